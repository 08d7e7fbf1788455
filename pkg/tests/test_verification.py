import json

import numpy as np
import pytest

from compact_psido import fourier as F
from compact_psido.group_geometry import haar_grid
from compact_psido.unitary_dual import IrrepLabel, character, enumerate_dual
from compact_psido.verification import (CHECKS, CheckReport, ConfigError, UsageError,
                                        central_bump_coefficients, resolve_config, run_check,
                                        solve_subelliptic)


def test_unknown_check_is_usage_error():
    with pytest.raises(UsageError):
        run_check("nosuch")


def test_coarse_grid_is_config_error():
    with pytest.raises(ConfigError):
        resolve_config("exactness", {"cutoff": 8, "resolution": 4})
    with pytest.raises(ConfigError):
        resolve_config("weak11", {"cutoff": 0.5})


def test_flags_override_defaults():
    cfg = resolve_config("weyl", {"cutoff": 64, "seed": 3})
    assert cfg["cutoff"] == 64 and cfg["seed"] == 3 and cfg["lambdas"] == [2, 4, 8, 16, 32]


@pytest.mark.parametrize("name", ["weyl", "exactness", "torus_oracle"])
def test_cheap_checks_pass(name):
    assert run_check(name).passed


def test_reports_are_byte_identical():
    a, b = run_check("subelliptic", {"n_functions": 4}), run_check("subelliptic", {"n_functions": 4})
    assert a.to_json() == b.to_json()
    assert "runtime_s" not in json.loads(a.to_json())
    assert "runtime_s" in json.loads(a.to_json(include_runtime=True))


def test_report_formats():
    rep = CheckReport("x", {"a": 1}, {"v": np.float64(1 / 3), "arr": np.arange(3)}, True, {"t": 1},
                      series={"s": [1.0, 2.0]})
    doc = json.loads(rep.to_json())
    assert doc["measured"]["v"] == 0.333333333333
    assert "status     PASS" in rep.to_text()
    assert rep.to_csv().splitlines() == ["series,index,value", "s,0,1.0", "s,1,2.0"]


def test_sub_laplacian_on_spin_half_character():
    # l = 1/2, m = +-1/2: l(l+1) - m^2 = 1/2, so u = 2 chi_{1/2}
    grid = haar_grid(4)
    lab = IrrepLabel("su2", 1)
    f = F.GridFunction(grid, character(lab, grid.nodes))
    u, rep = solve_subelliptic("sub_laplacian", f, enumerate_dual(4))
    assert np.allclose(u.values, 2 * f.values, atol=1e-13)
    assert rep["residual_l2"] < 1e-14


def test_heat_solve_residual():
    grid = haar_grid(8)
    duals = enumerate_dual(6)
    f = F.inverse_on_grid(F.random_coefficients(duals, seed=2, real=True), grid)
    u, rep = solve_subelliptic("heat", F.GridFunction(grid, f.values.real), duals)
    assert rep["residual_l2"] < 1e-12
    assert rep["notes"] == ["mean subtracted"]


def test_zero_data_sentinel():
    grid = haar_grid(4)
    _, rep = solve_subelliptic("sub_laplacian", F.GridFunction(grid, np.zeros(grid.size)),
                               enumerate_dual(4))
    assert rep["ratio"] == "0/0"
    with pytest.raises(UsageError):
        solve_subelliptic("wave", F.GridFunction(grid, np.zeros(grid.size)), enumerate_dual(4))


def test_central_bump_has_unit_l1_norm():
    duals = enumerate_dual(24)
    grid = haar_grid(24)
    f = F.inverse_on_grid(central_bump_coefficients(0.5, duals), grid)
    assert abs(np.dot(grid.weights, f.values.real) - 1.0) < 1e-12
    # truncation ripple makes the band-limited bump slightly negative in places
    assert abs(np.dot(grid.weights, np.abs(f.values)) - 1.0) < 0.05


def test_every_check_has_defaults():
    for name in CHECKS:
        resolve_config(name, None)
