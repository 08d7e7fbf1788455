import json
import re

import pytest

from compact_psido import cli
from compact_psido.cli import CONFIG_ENV, main

NAME = re.compile(r"^(?P<check>[\w-]+)-\d{8}T\d{6}Z-(?P<seed>\d+)\.(json|csv|txt)$")


def test_verify_weyl_writes_json(tmp_path):
    assert main(["verify", "weyl", "--cutoff", "32", "--out", str(tmp_path)]) == 0
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    m = NAME.match(files[0].name)
    assert m and m["check"] == "weyl" and m["seed"] == "0"
    assert json.loads(files[0].read_text())["passed"] is True


def test_unknown_check_exit_2(tmp_path):
    assert main(["verify", "nosuch", "--out", str(tmp_path)]) == 2


def test_bad_flag_exit_2():
    assert main(["verify", "weyl", "--bogus"]) == 2
    assert main(["verify", "weyl", "--format", "xml"]) == 2


def test_coarse_grid_exit_2(tmp_path):
    assert main(["verify", "exactness", "--resolution", "3", "--out", str(tmp_path)]) == 2


def test_failing_check_exit_1(tmp_path):
    # a zero-width band cannot hold the Weyl ratios
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": {"weyl": {"band": 1.0}}}))
    assert main(["verify", "weyl", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_solve_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["solve", "sub_laplacian", "--seed", "7", "--out", str(a)]) == 0
    assert main(["solve", "sub_laplacian", "--seed", "7", "--out", str(b)]) == 0
    (fa,), (fb,) = list(a.iterdir()), list(b.iterdir())
    assert fa.read_bytes() == fb.read_bytes()
    assert NAME.match(fa.name)["seed"] == "7"


def test_env_config_and_flag_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5, "formats": ["text"]}))
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    out = tmp_path / "o"
    assert main(["verify", "weyl", "--seed", "9", "--out", str(out)]) == 0
    (f,) = list(out.iterdir())
    assert f.suffix == ".txt" and NAME.match(f.name)["seed"] == "9"


def test_transform_round_trip(tmp_path):
    fw = tmp_path / "fw"
    assert main(["transform", "--cutoff", "4", "--out", str(fw)]) == 0
    (coeffs,) = list(fw.iterdir())
    inv = tmp_path / "inv"
    assert main(["transform", "--inverse", "--input", str(coeffs), "--cutoff", "4",
                 "--out", str(inv)]) == 0
    (vals,) = list(inv.iterdir())
    assert json.loads(vals.read_text())["format"] == "compact-psido-values"


def test_kernel_csv(tmp_path):
    assert main(["kernel", "--cutoff", "8", "--n", "5", "--out", str(tmp_path)]) == 0
    (f,) = list(tmp_path.iterdir())
    assert f.suffix == ".csv" and len(f.read_text().splitlines()) == 6


def test_grid_info(capsys):
    assert main(["grid-info", "--resolution", "4", "--cutoff", "8"]) == 0
    out = capsys.readouterr().out
    assert "exact_for_cutoff   false" in out and "nodes              512" in out


def test_same_second_runs_do_not_overwrite(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "_stamp", lambda: "20260101T000000Z")
    args = ["kernel", "--symbol", "power:-2", "--cutoff", "4", "--n", "4", "--out", str(tmp_path)]
    assert cli.main(args) == 0
    assert cli.main(args) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["kernel-20260101T000000Z-0.1.csv", "kernel-20260101T000000Z-0.csv"]
