"""Command-line entry point.

    compact-psido verify <check>|all   run numerical checks, write reports
    compact-psido solve <sub_laplacian|heat>
    compact-psido kernel               kernel decay slice as CSV
    compact-psido transform            forward/inverse transform of sampled data
    compact-psido grid-info            quadrature grid summary

Configuration comes from a JSON file (``--config`` or the environment
variable ``COMPACT_PSIDO_CONFIG``); command-line flags override it.  Exit
status is 0 when every requested check passes, 1 when one fails and 2 on a
usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import fourier as F
from .group_geometry import group_from_name, haar_grid
from .quantization import decay_slope
from .symbol_calculus import bessel_symbol, critical_test_symbol, power_symbol
from .unitary_dual import enumerate_dual, max_spin
from .verification import (CHECKS, CheckReport, ConfigError, UsageError, _canon, resolve_config,
                           run_check, solve_subelliptic)

CONFIG_ENV = "COMPACT_PSIDO_CONFIG"
FORMATS = ("json", "csv", "text")


@dataclass
class RunConfig:
    group: str = "su2"
    cutoff: float | None = None
    resolution: int | None = None
    seed: int = 0
    checks: list = field(default_factory=list)
    out: str = "."
    formats: list = field(default_factory=lambda: ["json"])
    overrides: dict = field(default_factory=dict)

    def validate(self):
        if self.group not in ("su2", "torus"):
            raise UsageError(f"unknown group {self.group!r}")
        if self.cutoff is not None and not self.cutoff >= 1:
            raise ConfigError("cutoff must be >= 1")
        if self.resolution is not None and self.resolution < 2:
            raise ConfigError("resolution must be >= 2")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        for f in self.formats:
            if f not in FORMATS:
                raise UsageError(f"unknown format {f!r}")
        return self

    def check_config(self, name: str) -> dict:
        cfg = dict(self.overrides.get(name, {}))
        for key in ("cutoff", "resolution"):
            if getattr(self, key) is not None:
                cfg[key] = getattr(self, key)
        cfg["seed"] = self.seed
        return cfg


def load_config(args) -> RunConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    doc = {}
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    rc = RunConfig(group=doc.get("group", "su2"), cutoff=doc.get("cutoff"),
                   resolution=doc.get("resolution"), seed=int(doc.get("seed", 0)),
                   out=doc.get("out", "."), formats=list(doc.get("formats", ["json"])),
                   overrides=dict(doc.get("checks", {})))
    # flags win
    if args.group is not None:
        rc.group = args.group
    if args.cutoff is not None:
        rc.cutoff = args.cutoff
    if args.resolution is not None:
        rc.resolution = args.resolution
    if args.seed is not None:
        rc.seed = args.seed
    if args.out is not None:
        rc.out = args.out
    if args.format is not None:
        rc.formats = [args.format]
    return rc.validate()


def _stamp() -> str:
    return time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())


def _write(rc: RunConfig, name: str, payloads: dict) -> list:
    """Write ``payloads[ext]`` for every requested format; returns the paths."""
    out = Path(rc.out)
    out.mkdir(parents=True, exist_ok=True)
    exts = {fmt: {"json": "json", "csv": "csv", "text": "txt"}[fmt] for fmt in rc.formats if fmt in payloads}
    stem = f"{name}-{_stamp()}-{rc.seed}"
    # never overwrite: runs within the same second get a numeric suffix
    n = 0
    while any((out / f"{stem}{f'.{n}' if n else ''}.{e}").exists() for e in exts.values()):
        n += 1
    if n:
        stem = f"{stem}.{n}"
    paths = []
    for fmt, ext in exts.items():
        p = out / f"{stem}.{ext}"
        p.write_text(payloads[fmt])
        paths.append(p)
    return paths


def _report_payloads(rep: CheckReport) -> dict:
    return {"json": rep.to_json(), "csv": rep.to_csv(), "text": rep.to_text()}


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_verify(args, rc: RunConfig) -> int:
    names = list(CHECKS) if args.check == "all" else [args.check]
    if args.check != "all" and args.check not in CHECKS:
        raise UsageError(f"unknown check {args.check!r}; choose from all, {', '.join(CHECKS)}")
    rc.checks = names
    # validate every configuration before running anything
    for name in names:
        resolve_config(name, rc.check_config(name))
    status = 0
    for name in names:
        rep = run_check(name, rc.check_config(name))
        sys.stdout.write(rep.to_text())
        sys.stdout.write(f"runtime    {rep.runtime:.2f} s\n")
        for p in _write(rc, name, _report_payloads(rep)):
            sys.stdout.write(f"wrote      {p}\n")
        if not rep.passed:
            status = 1
    return status


def _sample_function(rc: RunConfig, grid, cutoff):
    duals = enumerate_dual(cutoff)
    fhat = F.random_coefficients(duals, seed=rc.seed, decay=0.5, real=True)
    return F.GridFunction(grid, F.inverse_on_grid(fhat, grid).values.real)


def cmd_solve(args, rc: RunConfig) -> int:
    cutoff = rc.cutoff or 8
    duals = enumerate_dual(cutoff)
    res = rc.resolution or max(16, int(np.ceil(max_spin(duals) + 0.5)))
    if res < max_spin(duals) + 0.5:
        raise ConfigError(f"resolution {res} too coarse for cutoff {cutoff}")
    grid = haar_grid(res)
    f = _sample_function(rc, grid, cutoff)
    u, rep = solve_subelliptic(args.operator, f, duals)
    doc = {"operator": args.operator, "config": {"cutoff": cutoff, "resolution": res,
                                                 "seed": rc.seed, "group": rc.group},
           "report": rep, "passed": bool(rep["residual_l2"] <= 1e-9)}
    text = json.dumps(_canon(doc), sort_keys=True, indent=2) + "\n"
    rows = ["q0,q1,q2,q3,weight,f,u"]
    for node, w, fv, uv in zip(grid.nodes, grid.weights, f.values.real, u.values.real):
        rows.append(",".join(f"{x:.15g}" for x in (*node, w, fv, uv)))
    lines = [f"operator   {args.operator}",
             f"config     {json.dumps(doc['config'], sort_keys=True)}"]
    lines += [f"  {k:<20}  {json.dumps(_canon(v))}" for k, v in sorted(rep.items())]
    sys.stdout.write("\n".join(lines) + "\n")
    for p in _write(rc, args.operator, {"json": text, "csv": "\n".join(rows) + "\n",
                                        "text": "\n".join(lines) + "\n"}):
        sys.stdout.write(f"wrote      {p}\n")
    return 0 if doc["passed"] else 1


def _parse_symbol(text: str):
    kind, _, arg = text.partition(":")
    if kind == "power":
        return power_symbol(float(arg or -2))
    if kind == "bessel":
        return bessel_symbol(float(arg or -1))
    if kind == "critical":
        return critical_test_symbol()
    raise UsageError(f"unknown symbol {text!r}; use power:<m>, bessel:<beta> or critical")


def cmd_kernel(args, rc: RunConfig) -> int:
    sigma = _parse_symbol(args.symbol)
    cutoff = rc.cutoff or 24
    fit = decay_slope(sigma, enumerate_dual(cutoff), args.r_min, args.r_max, args.n)
    csv = fit["slice"].to_csv()
    sys.stdout.write(f"symbol {args.symbol}  cutoff {cutoff}  slope {fit['slope']:.6f}\n")
    rc_csv = RunConfig(**{**asdict(rc), "formats": ["csv"]})
    for p in _write(rc_csv, "kernel", {"csv": csv}):
        sys.stdout.write(f"wrote      {p}\n")
    return 0


def cmd_transform(args, rc: RunConfig) -> int:
    cutoff = rc.cutoff or 8
    duals = enumerate_dual(cutoff, group_from_name(rc.group))
    if rc.group == "su2":
        L = max_spin(duals)
        res = rc.resolution or int(np.ceil(L + 0.5))
        if res < L + 0.5:
            raise ConfigError(f"resolution {res} too coarse for cutoff {cutoff}")
    else:
        res = rc.resolution or 24
    grid = haar_grid(res, group_from_name(rc.group))
    if args.inverse:
        if not args.input:
            raise UsageError("--inverse needs --input <coefficients.json>")
        coeffs = F.FourierCoefficients.from_json(Path(args.input).read_text())
        f = F.inverse_on_grid(coeffs, grid)
        doc = {"format": "compact-psido-values", "group": rc.group, "resolution": res,
               "real": f.values.real.tolist(), "imag": f.values.imag.tolist()}
        sys.stdout.write(f"inverse transform: {len(coeffs)} blocks -> {grid.size} nodes\n")
        for p in _write(rc, "transform", {"json": json.dumps(doc) + "\n"}):
            sys.stdout.write(f"wrote      {p}\n")
        return 0
    if args.input:
        doc = json.loads(Path(args.input).read_text())
        vals = np.asarray(doc["real"], float) + 1j * np.asarray(doc.get("imag", np.zeros(len(doc["real"]))))
        f = F.GridFunction(grid, vals)
    else:
        if rc.group == "su2":
            f = _sample_function(rc, grid, cutoff)
        else:
            coeffs = F.random_coefficients(duals, seed=rc.seed, decay=0.5, real=True)
            f = F.inverse_on_grid(coeffs, grid)
    coeffs = F.forward(f, duals, cutoff)
    back = F.inverse_on_grid(coeffs, grid)
    err = float(np.abs(back.values - f.values).max())
    sys.stdout.write(f"forward transform: {grid.size} nodes -> {len(coeffs)} blocks; "
                     f"round-trip error {err:.3e}\n")
    for p in _write(rc, "transform", {"json": coeffs.to_json() + "\n"}):
        sys.stdout.write(f"wrote      {p}\n")
    return 0


def cmd_grid_info(args, rc: RunConfig) -> int:
    group = group_from_name(rc.group)
    res = rc.resolution or 16
    grid = haar_grid(res, group)
    info = {"group": rc.group, "resolution": res, "nodes": grid.size,
            "exactness_degree": grid.exactness_degree, "spacing": grid.spacing,
            "weight_sum": float(np.sum(grid.weights)), "shape": list(grid.shape or ())}
    if rc.cutoff is not None and rc.group == "su2":
        L = max_spin(enumerate_dual(rc.cutoff))
        info["cutoff"] = rc.cutoff
        info["max_spin"] = L
        info["exact_for_cutoff"] = bool(res >= L + 0.5)
    sys.stdout.write("\n".join(f"{k:<18} {json.dumps(_canon(v))}" for k, v in info.items()) + "\n")
    if args.write:
        _write(rc, "grid", {"json": grid.to_json() + "\n"})
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(p):
    p.add_argument("--cutoff", type=float, help="dual truncation Lambda")
    p.add_argument("--resolution", type=int, help="grid resolution N")
    p.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=FORMATS, help="output format")
    p.add_argument("--config", help=f"JSON config file (default ${CONFIG_ENV})")
    p.add_argument("--group", choices=("su2", "torus"), help="group backend")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="compact-psido",
                                 description="Pseudo-differential operators on SU(2) and tori.")
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a named check or 'all'")
    v.add_argument("check", help=f"one of all, {', '.join(CHECKS)}")
    _common(v)
    s = sub.add_parser("solve", help="solve a subelliptic equation")
    s.add_argument("operator", choices=("sub_laplacian", "heat"))
    _common(s)
    k = sub.add_parser("kernel", help="emit a kernel decay slice as CSV")
    k.add_argument("--symbol", default="power:-2", help="power:<m>, bessel:<beta> or critical")
    k.add_argument("--r-min", type=float, default=0.05)
    k.add_argument("--r-max", type=float, default=0.5)
    k.add_argument("--n", type=int, default=24)
    _common(k)
    t = sub.add_parser("transform", help="forward or inverse Fourier transform")
    t.add_argument("--input", help="values JSON (forward) or coefficients JSON (inverse)")
    t.add_argument("--inverse", action="store_true")
    _common(t)
    g = sub.add_parser("grid-info", help="describe a quadrature grid")
    g.add_argument("--write", action="store_true", help="also write the grid as JSON")
    _common(g)
    return ap


COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "kernel": cmd_kernel,
            "transform": cmd_transform, "grid-info": cmd_grid_info}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rc = load_config(args)
        return COMMANDS[args.command](args, rc)
    except (UsageError, ConfigError) as exc:
        sys.stderr.write(f"compact-psido: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
