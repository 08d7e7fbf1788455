"""Numerical experiments for the kernel, boundedness and decomposition
estimates, the subelliptic solver, and the report format.

Every check is a pure function of its configuration.  ``run_check`` merges
the caller's config over the check's defaults, validates the grid against the
dual cutoff, runs the experiment and returns a :class:`CheckReport` whose
pass flag depends only on the measured quantities and the stated tolerances.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import fourier as F
from .function_spaces import (bmo_seminorm, cz_decompose, lp_norm, make_atom, sample_balls,
                              weak_l1_quasinorm)
from .group_geometry import (SU2, Ball, GroupPoint, Torus, compose, exp_map, geodesic_distance,
                             haar_grid, identity, inverse, random_points)
from .quantization import (apply_multiplier, decay_slope, hormander_integral, kernel_many,
                           l2_operator_norm, lp_ratio_samples, quantize_coefficients)
from .symbol_calculus import (bessel_symbol, build_cutoff, critical_test_symbol, dyadic_piece,
                              multi_indices, power_symbol, random_multiplier,
                              seminorm_profile, su2_difference_family, subelliptic_symbols,
                              torus_difference_family, multiplier_symbol, difference_apply)
from .unitary_dual import (IrrepLabel, character, enumerate_dual, evaluate_many, max_spin,
                           weyl_closed_form, weyl_sum)


class UsageError(ValueError):
    """Unknown check name or malformed request."""


class ConfigError(ValueError):
    """Configuration that cannot be run, e.g. a grid too coarse for the cutoff."""


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _canon(x):
    """JSON-ready copy with floats rounded to 12 significant digits."""
    if isinstance(x, dict):
        return {str(k): _canon(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_canon(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_canon(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(x, complex):
        return [_canon(x.real), _canon(x.imag)]
    return x


@dataclass
class CheckReport:
    name: str
    config: dict
    measured: dict
    passed: bool
    tolerance: dict
    runtime: float = 0.0
    series: dict = field(default_factory=dict)

    def to_dict(self, include_runtime: bool = False) -> dict:
        d = {"check": self.name, "config": self.config, "passed": bool(self.passed),
             "tolerance": self.tolerance, "measured": self.measured, "series": self.series}
        if include_runtime:
            d["runtime_s"] = self.runtime
        return _canon(d)

    def to_json(self, include_runtime: bool = False) -> str:
        """Canonical JSON.  The runtime is left out by default so identical
        configurations give byte-identical reports."""
        return json.dumps(self.to_dict(include_runtime), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"check      {self.name}",
                 f"status     {'PASS' if self.passed else 'FAIL'}",
                 f"config     {json.dumps(_canon(self.config), sort_keys=True)}",
                 f"tolerance  {json.dumps(_canon(self.tolerance), sort_keys=True)}"]
        width = max((len(k) for k in self.measured), default=0)
        for k in sorted(self.measured):
            v = _canon(self.measured[k])
            lines.append(f"  {k:<{width}}  {json.dumps(v)}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        """Series as long-format CSV: ``series,index,value``."""
        rows = ["series,index,value"]
        for name in sorted(self.series):
            vals = _canon(self.series[name])
            if not isinstance(vals, list):
                vals = [vals]
            for i, v in enumerate(vals):
                rows.append(f"{name},{i},{json.dumps(v) if isinstance(v, list) else v}")
        return "\n".join(rows) + "\n"


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

CHECK_DEFAULTS = {
    "exactness": {"cutoff": 8, "resolution": 16, "max_spin_schur": 4, "samples": 100},
    "weyl": {"cutoff": 32, "lambdas": [2, 4, 8, 16, 32], "band": 2.0},
    "kernel_decay": {"cutoff": 24, "r_min": 0.05, "r_max": 0.5, "n_radii": 24,
                     "slope_target": -1.0, "slope_tol": 0.3, "bounded_order": -4.0,
                     "stability": 0.05, "n_points": 400},
    "hormander_small_R": {"cutoff": 16, "resolution": 24, "exponents": [1, 2, 3, 4, 5],
                          "n_pairs": 6, "band": 5.0, "stability": 0.15},
    "hormander_large_R": {"cutoff": 16, "resolution": 24, "radii": [1.0, 1.25, 1.5, 1.75, 2.0, 3.14159],
                          "reference_exponents": [1, 2, 3, 4, 5], "n_pairs": 6, "band": 5.0,
                          "stability": 0.15},
    "l2_bound": {"cutoff": 8, "n_symbols": 6, "stability": 0.10, "oracle_tol": 1e-3},
    "weak11": {"cutoff": 16, "resolution": 24, "ks": [1, 2, 3, 4, 5], "band": 3.0},
    "atoms_h1": {"cutoff": 16, "resolution": 24, "n_atoms": 50, "r_min": 0.05, "r_max": math.pi,
                 "stability": 0.10},
    "bmo_linfty": {"cutoff": 8, "resolution": 12, "n_functions": 8, "n_centers": 16, "n_radii": 8,
                   "stability": 0.10},
    "lp_lemma": {"cutoff": 8, "resolution": 12, "trials": 20, "stability": 0.10},
    "cz_properties": {"resolution": 10, "n_functions": 30, "mean_tol": 1e-9},
    "smoothing_lemma": {"cutoff": 32, "ts": [4, 8, 16, 32], "rs": [-1, -2], "max_order": 3},
    "subelliptic": {"cutoff": 8, "resolution": 16, "n_functions": 20, "residual_tol": 1e-9,
                    "band": 10.0},
    "torus_oracle": {"group": "torus", "cutoff": 8, "resolution": 24, "tol": 1e-9},
}

CHECKS = ("weyl", "kernel_decay", "hormander_small_R", "hormander_large_R", "l2_bound", "weak11",
          "atoms_h1", "bmo_linfty", "lp_lemma", "cz_properties", "smoothing_lemma",
          "exactness", "subelliptic", "torus_oracle")


def resolve_config(name: str, config: dict | None) -> dict:
    if name not in CHECK_DEFAULTS:
        raise UsageError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    cfg = {"group": "su2", "seed": 0}
    cfg.update(CHECK_DEFAULTS[name])
    torus = cfg["group"] == "torus"
    for k, v in (config or {}).items():
        if v is not None:
            cfg[k] = v
    if "cutoff" in cfg and cfg["cutoff"] < 1:
        raise ConfigError("cutoff must be >= 1")
    if "resolution" in cfg:
        if int(cfg["resolution"]) < 2:
            raise ConfigError("resolution must be >= 2")
        if "cutoff" in cfg and not torus:
            L = max_spin(enumerate_dual(cfg["cutoff"]))
            if cfg["resolution"] < L + 0.5:
                raise ConfigError(f"resolution {cfg['resolution']} cannot integrate products of spin "
                                  f"{L} exactly; need resolution >= {L + 0.5}")
    return cfg


def run_check(name: str, config: dict | None = None) -> CheckReport:
    cfg = resolve_config(name, config)
    t0 = time.perf_counter()
    measured, passed, tol, series = _RUNNERS[name](cfg)
    rep = CheckReport(name, _canon(cfg), measured, bool(passed), tol, time.perf_counter() - t0, series)
    return rep


def _rel_change(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))


def _duals(cutoff):
    return enumerate_dual(cutoff)


# --------------------------------------------------------------------------
# individual checks
# --------------------------------------------------------------------------

def _check_weyl(cfg):
    lams = cfg["lambdas"]
    sums = [weyl_sum(0.0, lam) for lam in lams]
    closed = [weyl_closed_form(lam) for lam in lams]
    exact = all(s == c for s, c in zip(sums, closed))
    ratios = [s / lam ** 3 for s, lam in zip(sums, lams)]
    band = max(ratios) / min(ratios)
    passed = exact and band <= cfg["band"]
    return ({"sums": sums, "closed_form": closed, "exact_match": exact, "ratios": ratios,
             "band": band},
            passed, {"band": cfg["band"], "exact": True}, {"lambda": lams, "ratio": ratios})


def continuum_kernel_inverse_laplacian(theta):
    """``sum_l d_l chi_l(theta) / (1 + l(l+1))`` in closed form."""
    s3 = math.sqrt(3.0)
    return 2 * np.pi * np.sinh(s3 * (np.pi - theta)) / (np.sinh(s3 * np.pi) * np.sin(theta))


def _check_kernel_decay(cfg):
    lam = cfg["cutoff"]
    fits = {}
    for label, cut in (("base", lam), ("doubled", 2 * lam)):
        r = decay_slope(power_symbol(-2.0), _duals(cut), cfg["r_min"], cfg["r_max"], cfg["n_radii"])
        fits[label] = r
    radii = fits["base"]["radii"]
    exact_slope = float(np.polyfit(np.log(radii), np.log(continuum_kernel_inverse_laplacian(radii)), 1)[0])
    slope = fits["base"]["slope"]
    ok_slope = abs(slope - cfg["slope_target"]) <= cfg["slope_tol"]
    # bounded kernel: n + m < 0
    P = random_points(SU2, cfg["n_points"], cfg["seed"])
    sups = []
    imag = []
    for cut in (lam, 2 * lam):
        k = kernel_many(power_symbol(cfg["bounded_order"]), SU2.identity()[None], P, _duals(cut))
        sups.append(float(np.abs(k).max()))
        imag.append(float(np.abs(k.imag).max()))
    stab = abs(sups[1] - sups[0]) / sups[0]
    ok_bounded = stab <= cfg["stability"]
    return ({"slope": slope, "slope_doubled": fits["doubled"]["slope"],
             "continuum_slope": exact_slope, "slope_ok": ok_slope,
             "bounded_sup": sups, "bounded_relative_change": stab, "bounded_ok": ok_bounded,
             "bounded_max_imag": max(imag)},
            ok_slope and ok_bounded,
            {"slope": [cfg["slope_target"] - cfg["slope_tol"], cfg["slope_target"] + cfg["slope_tol"]],
             "stability": cfg["stability"]},
            {"radius": radii, "abs_K": fits["base"]["abs_K"],
             "abs_K_doubled": fits["doubled"]["abs_K"]})


def _pair_samples(R, n, rng):
    """Random ``(z, y)`` with ``d(z, y) = R``."""
    out = []
    for _ in range(n):
        z = GroupPoint(SU2, SU2.random(1, rng)[0])
        v = rng.standard_normal(3)
        v *= R / np.linalg.norm(v)
        out.append((z, compose(z, exp_map(v))))
    return out


def _hormander_series(radii, cutoff, resolution, n_pairs, seed):
    sigma = critical_test_symbol()
    duals = _duals(cutoff)
    grid = haar_grid(resolution)
    T = max(irr.weight for irr in duals)
    out = []
    for i, R in enumerate(radii):
        rng = np.random.default_rng([seed, i])
        vals = [hormander_integral(sigma, z, y, R, duals, grid, t_cap=T)
                for z, y in _pair_samples(min(R, math.pi), n_pairs, rng)]
        out.append(max(vals))
    return np.array(out)


def _check_hormander_small(cfg):
    radii = [2.0 ** -k for k in cfg["exponents"]]
    base = _hormander_series(radii, cfg["cutoff"], cfg["resolution"], cfg["n_pairs"], cfg["seed"])
    dbl = _hormander_series(radii, 2 * cfg["cutoff"], 2 * cfg["resolution"], cfg["n_pairs"], cfg["seed"])
    band = float(base.max() / base.min())
    change = _rel_change(base, dbl)
    passed = band <= cfg["band"] and change <= cfg["stability"]
    return ({"radii": radii, "values": base, "values_doubled": dbl, "band": band,
             "relative_change": change, "t_cap": "max <zeta>"},
            passed, {"band": cfg["band"], "stability": cfg["stability"]},
            {"R": radii, "integral": base, "integral_doubled": dbl})


def _check_hormander_large(cfg):
    radii = list(cfg["radii"])
    ref_r = [2.0 ** -k for k in cfg["reference_exponents"]]
    runs = {}
    for tag, cut, res in (("base", cfg["cutoff"], cfg["resolution"]),
                          ("doubled", 2 * cfg["cutoff"], 2 * cfg["resolution"])):
        runs[tag] = (_hormander_series(radii, cut, res, cfg["n_pairs"], cfg["seed"]),
                     _hormander_series(ref_r, cut, res, cfg["n_pairs"], cfg["seed"]))
    large, small = runs["base"]
    large2, _ = runs["doubled"]
    bound = cfg["band"] * float(small.min())
    uniform = float(large.max()) <= bound
    change = abs(large2.max() - large.max()) / large.max() if large.max() > 0 else 0.0
    passed = uniform and change <= cfg["stability"]
    return ({"radii": radii, "values": large, "values_doubled": large2,
             "max_large": float(large.max()), "small_R_min": float(small.min()),
             "small_R_max": float(small.max()), "max_large_over_small_min": float(large.max() / small.min()),
             "relative_change_of_max": float(change),
             "empty_complement": [r >= math.pi / 2 for r in radii]},
            passed, {"band": cfg["band"], "stability": cfg["stability"]},
            {"R": radii, "integral": large, "integral_doubled": large2})


def _check_l2_bound(cfg):
    symbols = [("critical_test", critical_test_symbol())]
    symbols += [(f"random_S0_{k}", random_multiplier(cfg["seed"] + k, 0.0)) for k in range(cfg["n_symbols"])]
    rows = {}
    worst_change = 0.0
    worst_oracle = 0.0
    for name, sig in symbols:
        est = []
        for cut in (cfg["cutoff"], 2 * cfg["cutoff"]):
            duals = _duals(cut)
            est.append(l2_operator_norm(sig, duals, seed=cfg["seed"], max_iter=400, rtol=1e-14))
            oracle = max(float(np.linalg.norm(sig.at(irr.label), 2)) for irr in duals)
            worst_oracle = max(worst_oracle, abs(est[-1] - oracle) / oracle)
        ch = abs(est[1] - est[0]) / est[0]
        worst_change = max(worst_change, ch)
        rows[name] = {"norm": est[0], "norm_doubled": est[1], "relative_change": ch}
    passed = worst_change <= cfg["stability"] and worst_oracle <= cfg["oracle_tol"]
    return ({"symbols": rows, "max_relative_change": worst_change,
             "max_oracle_error": worst_oracle},
            passed, {"stability": cfg["stability"], "oracle": cfg["oracle_tol"]}, {})


def central_bump_coefficients(radius: float, duals, n_quad: int = 400) -> F.FourierCoefficients:
    """Coefficients of ``c * psi(|x| / radius)``, ``psi(s) = exp(-1/(1 - s^2))``,
    normalized to unit L1 norm.  Central functions have ``fhat(l) = a_l I``
    with ``a_l = (1/d) int f conj(chi_l)``, and the Haar measure of the
    radial variable is ``(2/pi) sin^2(theta) d theta``."""
    x, w = np.polynomial.legendre.leggauss(n_quad)
    th = 0.5 * radius * (x + 1)
    w = 0.5 * radius * w
    s = th / radius
    psi = np.exp(-1.0 / (1.0 - s * s))
    dens = (2 / np.pi) * np.sin(th) ** 2 * w
    c = 1.0 / np.dot(dens, psi)
    out = {}
    for irr in duals:
        lab = irr.label
        chi = np.sin(lab.dim * th) / np.sin(th)
        a = c * np.dot(dens, psi * chi) / lab.dim
        out[lab] = a * np.eye(lab.dim, dtype=complex)
    return F.FourierCoefficients(out)


def _check_weak11(cfg):
    sigma = critical_test_symbol()
    res = {}
    for tag, cut, rres in (("base", cfg["cutoff"], cfg["resolution"]),
                           ("doubled", 2 * cfg["cutoff"], 2 * cfg["resolution"])):
        duals = _duals(cut)
        grid = haar_grid(rres)
        weak, strong = [], []
        for k in cfg["ks"]:
            fhat = central_bump_coefficients(2.0 ** -k, duals)
            Tf = quantize_coefficients(sigma, fhat, grid)
            weak.append(weak_l1_quasinorm(Tf))
            strong.append(lp_norm(Tf, 1))
        res[tag] = (np.array(weak), np.array(strong))
    weak, strong = res["base"]
    band = float(weak.max() / weak.min())
    passed = band <= cfg["band"]
    L = max_spin(_duals(cfg["cutoff"]))
    return ({"radii": [2.0 ** -k for k in cfg["ks"]], "weak_ratio": weak, "l1_ratio": strong,
             "band": band, "l1_band": float(strong.max() / strong.min()),
             "weak_ratio_doubled": res["doubled"][0], "l1_ratio_doubled": res["doubled"][1],
             "saturated": [2.0 ** -k * L < 1 for k in cfg["ks"]]},
            passed, {"band": cfg["band"]},
            {"k": cfg["ks"], "weak": weak, "l1": strong})


def _atom_corpus(cfg):
    rng = np.random.default_rng(cfg["seed"])
    radii = np.geomspace(cfg["r_min"], cfg["r_max"], cfg["n_atoms"])
    atoms = []
    for i, R in enumerate(radii):
        z = GroupPoint(SU2, SU2.random(1, rng)[0])
        atoms.append(make_atom(z, float(R), "flat" if i % 2 == 0 else "smooth", seed=cfg["seed"] * 1000 + i))
    return atoms


def _check_atoms(cfg):
    sigma = critical_test_symbol()
    atoms = _atom_corpus(cfg)
    norms = {}
    for tag, cut, res in (("base", cfg["cutoff"], cfg["resolution"]),
                          ("doubled", 2 * cfg["cutoff"], 2 * cfg["resolution"])):
        duals = _duals(cut)
        grid = haar_grid(res)
        norms[tag] = np.array([lp_norm(quantize_coefficients(sigma, a.coefficients(duals), grid), 1)
                               for a in atoms])
    mx, mx2 = float(norms["base"].max()), float(norms["doubled"].max())
    change = abs(mx2 - mx) / mx
    atom_ok = all(abs(a.mean()) <= 1e-10 and abs(a.sup() * a.volume - 1) <= 1e-12 for a in atoms)
    passed = bool(np.isfinite(mx)) and change <= cfg["stability"] and atom_ok
    return ({"max_Ta_l1": mx, "max_Ta_l1_doubled": mx2, "relative_change": change,
             "atom_invariants_ok": atom_ok, "n_atoms": len(atoms)},
            passed, {"stability": cfg["stability"]},
            {"radius": [a.ball.radius for a in atoms], "Ta_l1": norms["base"],
             "Ta_l1_doubled": norms["doubled"]})


def _sign_corpus(cfg, n):
    """Functions with ``|f| = 1``: signs of random smooth functions."""
    out = []
    for k in range(n):
        g = F.random_coefficients(enumerate_dual(3), seed=cfg["seed"] * 100 + k, real=True)
        out.append(g)
    return out


def _check_bmo(cfg):
    sigma = critical_test_symbol()
    corpus = _sign_corpus(cfg, cfg["n_functions"])
    rng = np.random.default_rng(cfg["seed"])
    centers = SU2.random(cfg["n_centers"], rng)
    res = {}
    for tag, cut, r in (("base", cfg["cutoff"], cfg["resolution"]),
                        ("doubled", 2 * cfg["cutoff"], 2 * cfg["resolution"])):
        duals = _duals(cut)
        grid = haar_grid(r)
        fine = haar_grid(2 * r)
        radii = np.geomspace(3 * math.pi / cfg["resolution"], math.pi, cfg["n_radii"])
        balls = [Ball(GroupPoint(SU2, c), float(R)) for c in centers for R in radii]
        vals = []
        for g in corpus:
            f = F.GridFunction(fine, np.sign(F.inverse_on_grid(g, fine).values.real))
            fhat = F.forward(f, duals)
            Tf = quantize_coefficients(sigma, fhat, grid)
            vals.append(bmo_seminorm(Tf, balls) / lp_norm(f, np.inf))
        res[tag] = np.array(vals)
    mx, mx2 = float(res["base"].max()), float(res["doubled"].max())
    change = abs(mx2 - mx) / mx
    return ({"max_bmo_ratio": mx, "max_bmo_ratio_doubled": mx2, "relative_change": change},
            change <= cfg["stability"], {"stability": cfg["stability"]},
            {"bmo": res["base"], "bmo_doubled": res["doubled"]})


def _check_lp_lemma(cfg):
    sigma = critical_test_symbol()
    rho = sigma.rho
    q = 2.0 / rho
    corpus = _sign_corpus(cfg, cfg["trials"])
    res = {}
    for tag, cut, r in (("base", cfg["cutoff"], cfg["resolution"]),
                        ("doubled", 2 * cfg["cutoff"], 2 * cfg["resolution"])):
        duals = _duals(cut)
        grid = haar_grid(r)
        fine = haar_grid(2 * r)
        vals = []
        for g in corpus:
            f = F.GridFunction(fine, np.sign(F.inverse_on_grid(g, fine).values.real))
            fhat = F.forward(f, duals)
            Tf = quantize_coefficients(sigma, fhat, grid)
            vals.append(lp_norm(Tf, q) / lp_norm(f, 2))
        res[tag] = np.array(vals)
    mx, mx2 = float(res["base"].max()), float(res["doubled"].max())
    change = abs(mx2 - mx) / mx
    return ({"q": q, "max_ratio": mx, "max_ratio_doubled": mx2, "relative_change": change},
            change <= cfg["stability"], {"stability": cfg["stability"]},
            {"ratio": res["base"], "ratio_doubled": res["doubled"]})


def cz_corpus(grid, n, seed):
    """Mixed corpus: narrow tall bumps, spikes and rough random fields."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        kind = k % 3
        if kind == 0:
            c = SU2.random(1, rng)[0]
            r = rng.uniform(0.15, 0.6)
            d = grid.distances_to(c)
            v = np.exp(-(d / r) ** 2) * rng.uniform(5, 50) + 0.1 * rng.random(grid.size)
        elif kind == 1:
            v = 0.2 * rng.random(grid.size)
            idx = rng.choice(grid.size, size=rng.integers(1, 6), replace=False)
            v[idx] += rng.uniform(10, 200, size=len(idx)) / grid.weights[idx] * 1e-3
        else:
            v = rng.standard_normal(grid.size) ** 3
        out.append(F.GridFunction(grid, v))
    return out


def _check_cz(cfg):
    grid = haar_grid(cfg["resolution"])
    corpus = cz_corpus(grid, cfg["n_functions"], cfg["seed"])
    rng = np.random.default_rng(cfg["seed"] + 1)
    flags = {str(i): True for i in range(1, 7)}
    worst = {}
    consts = None
    n_bad = []
    for f in corpus:
        level = float(rng.uniform(1.5, 20.0)) * lp_norm(f, 1)
        cz = cz_decompose(f, level)
        consts = cz.constants
        chk = cz.check(cfg["mean_tol"])
        m = cz.measured()
        for k, v in chk.items():
            flags[k] = flags[k] and bool(v)
        for k, v in m.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                worst[k] = max(worst.get(k, 0.0), float(v))
        n_bad.append(m["n_bad"])
    passed = all(flags.values())
    return ({"properties": flags, "constants": consts, "overlap_bound": cz.overlap_bound,
             "worst_measured": worst, "n_bad_parts": n_bad},
            passed, {"mean": cfg["mean_tol"]}, {"n_bad": n_bad})


def _check_smoothing(cfg):
    sigma = critical_test_symbol()
    phi = build_cutoff()
    fam = su2_difference_family()
    duals = _duals(cfg["cutoff"])
    ts = cfg["ts"]
    alphas = [a for order in range(cfg["max_order"] + 1) for a in multi_indices(len(fam), order)]
    sups = np.zeros((len(alphas), len(ts)))
    for j, t in enumerate(ts):
        st = dyadic_piece(sigma, t, phi)
        for i, a in enumerate(alphas):
            labels, prof = seminorm_profile(st.with_class(0.0, 1.0, 0.0), a, (), duals, fam)
            # the profile is normalized by <zeta>^(-|a|); undo it to get the raw norm
            w = np.array([lab.weight for lab in labels])
            sups[i, j] = float(np.max(prof * w ** (-sum(a))))
    logt = np.log(ts)
    rows = []
    ok_all = True
    for i, a in enumerate(alphas):
        expo = float(np.polyfit(logt, np.log(np.maximum(sups[i], 1e-300)), 1)[0])
        row = {"alpha": list(a), "order": sum(a), "growth_exponent": expo}
        for r in cfg["rs"]:
            seq = sups[i] * np.asarray(ts, float) ** (-r)
            slope = expo - r
            ok = slope <= 0.0
            row[f"r={r}"] = {"trend": slope, "non_increasing": bool(ok)}
            ok_all = ok_all and ok
        rows.append(row)
    by_order = {}
    for row in rows:
        o = row["order"]
        by_order.setdefault(o, []).append(row["growth_exponent"])
    summary = {str(o): [min(v), max(v)] for o, v in by_order.items()}
    return ({"per_alpha": rows, "growth_exponent_range_by_order": summary,
             "failing": [r["alpha"] for r in rows
                         if not all(r[f"r={x}"]["non_increasing"] for x in cfg["rs"])]},
            ok_all, {"trend": "fitted log-log slope of sup * t^(-r) <= 0"},
            {"t": ts, "sup_alpha0": sups[0]})


# --------------------------------------------------------------------------
# subelliptic problems
# --------------------------------------------------------------------------

SUBELLIPTIC_OPERATORS = {"sub_laplacian": ("Lsub", "parametrix_sub"),
                         "heat": ("heat", "parametrix_heat")}


def solve_subelliptic(tag: str, f: F.GridFunction, duals):
    """Solve ``T u = f - mean(f)`` on the truncated dual.

    ``sub_laplacian`` is ``L_sub = -(X^2 + Y^2)``; ``heat`` is ``Z - X^2 - Y^2``.
    Returns ``u`` and a report with the spectral residual, the weak-L1
    quasinorm of ``u``, ``||J^{-1/4} f||_1`` and their ratio.
    """
    if tag not in SUBELLIPTIC_OPERATORS:
        raise UsageError(f"unknown operator {tag!r}; choose sub_laplacian or heat")
    op_key, par_key = SUBELLIPTIC_OPERATORS[tag]
    syms = subelliptic_symbols()
    grid = f.grid
    mean = f.mean()
    notes = []
    if abs(mean) > 0:
        notes.append("mean subtracted")
    f0 = F.GridFunction(grid, f.values - mean)
    fhat = F.forward(f0, duals)
    zero = IrrepLabel("su2", 0)
    if zero in fhat:
        fhat.blocks[zero] = np.zeros((1, 1), complex)
    uhat = apply_multiplier(syms[par_key], fhat)
    u = F.inverse_on_grid(uhat, grid)
    resid = F.spectral_l2_norm(apply_multiplier(syms[op_key], uhat) - fhat)
    weak_u = weak_l1_quasinorm(u)
    w_norm = lp_norm(F.inverse_on_grid(apply_multiplier(bessel_symbol(-0.25), fhat), grid), 1)
    if w_norm == 0.0:
        ratio = "0/0" if weak_u == 0.0 else "inf"
    else:
        ratio = weak_u / w_norm
    report = {"operator": tag, "residual_l2": resid, "u_weak_l1": weak_u,
              "f_W1_minus_quarter": w_norm, "ratio": ratio, "mean_removed": complex(mean),
              "notes": notes}
    return u, report


def _check_subelliptic(cfg):
    grid = haar_grid(cfg["resolution"])
    duals = _duals(cfg["cutoff"])
    worst_res = 0.0
    ratios = {}
    for tag in SUBELLIPTIC_OPERATORS:
        rs = []
        for k in range(cfg["n_functions"]):
            fhat = F.random_coefficients(duals, seed=cfg["seed"] * 100 + k, decay=0.5, real=True)
            f = F.inverse_on_grid(fhat, grid)
            _, rep = solve_subelliptic(tag, F.GridFunction(grid, f.values.real), duals)
            worst_res = max(worst_res, rep["residual_l2"])
            rs.append(rep["ratio"])
        ratios[tag] = np.array(rs)
    bands = {t: float(r.max() / r.min()) for t, r in ratios.items()}
    passed = worst_res <= cfg["residual_tol"] and all(b <= cfg["band"] for b in bands.values())
    return ({"max_residual": worst_res, "bands": bands,
             "max_ratio": {t: float(r.max()) for t, r in ratios.items()}},
            passed, {"residual": cfg["residual_tol"], "band": cfg["band"]},
            {t: r for t, r in ratios.items()})


# --------------------------------------------------------------------------
# exactness and torus cross-checks
# --------------------------------------------------------------------------

def _check_exactness(cfg):
    t0 = time.perf_counter()
    grid = haar_grid(cfg["resolution"])
    Lschur = cfg["max_spin_schur"]
    cols = []
    dims = []
    for j2 in range(int(2 * Lschur) + 1):
        D = evaluate_many(IrrepLabel("su2", j2), grid.nodes).reshape(grid.size, -1)
        cols.append(D)
        dims += [j2 + 1] * D.shape[1]
    Phi = np.concatenate(cols, axis=1)
    gram = (Phi.conj().T * grid.weights) @ Phi
    target = np.diag(1.0 / np.array(dims, float))
    schur = float(np.abs(gram - target).max())
    duals = _duals(cfg["cutoff"])
    fhat = F.random_coefficients(duals, seed=cfg["seed"], decay=0.5)
    f = F.inverse_on_grid(fhat, grid)
    back = F.forward(f, duals)
    round_trip = back.max_abs_diff(fhat)
    f_again = F.inverse_on_grid(back, grid)
    round_trip_values = float(np.abs(f_again.values - f.values).max())
    parseval = abs(F.spectral_l2_norm(back) - f.l2_norm())
    rng = np.random.default_rng(cfg["seed"])
    n = cfg["samples"]
    a, b, c = (SU2.random(n, rng) for _ in range(3))
    assoc = float(np.abs(SU2.compose(SU2.compose(a, b), c) - SU2.compose(a, SU2.compose(b, c))).max())
    inv = float(np.abs(SU2.compose(SU2.inverse(a), a) - SU2.identity()).max())
    left = float(np.abs(SU2.distance(SU2.compose(c, a), SU2.compose(c, b)) - SU2.distance(a, b)).max())
    right = float(np.abs(SU2.distance(SU2.compose(a, c), SU2.compose(b, c)) - SU2.distance(a, b)).max())
    tri = float(np.max(SU2.distance(a, c) - SU2.distance(a, b) - SU2.distance(b, c)))
    runtime = time.perf_counter() - t0
    passed = (schur <= 1e-8 and parseval <= 1e-9 and round_trip <= 1e-9 and round_trip_values <= 1e-9
              and max(assoc, inv, left, right) <= 1e-10 and tri <= 1e-12 and runtime < 30)
    return ({"schur": schur, "parseval": parseval, "round_trip_coefficients": round_trip,
             "round_trip_values": round_trip_values, "associativity": assoc, "inverse": inv,
             "left_invariance": left, "right_invariance": right, "triangle_excess": tri,
             "runtime_under_30s": runtime < 30},
            passed, {"schur": 1e-8, "parseval": 1e-9, "round_trip": 1e-9, "group": 1e-10}, {})


def _check_torus(cfg):
    """Torus transforms, differences and kernels against scalar formulas."""
    n = cfg["resolution"]
    grid = haar_grid(n, Torus(1))
    duals = enumerate_dual(cfg["cutoff"], Torus(1))
    K = int(max(abs(irr.label.key[0]) for irr in duals))
    rng = np.random.default_rng(cfg["seed"])
    vals = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f = F.GridFunction(grid, vals)
    fhat = F.forward(f, duals)
    fft = np.fft.fft(vals) / n
    err_fwd = max(abs(fhat[irr.label][0, 0] - fft[irr.label.key[0] % n]) for irr in duals)
    c = F.random_coefficients(duals, seed=cfg["seed"])
    x = grid.nodes[:, 0]
    direct = sum(c[irr.label][0, 0] * np.exp(1j * irr.label.key[0] * x) for irr in duals)
    err_inv = float(np.abs(F.inverse_on_grid(c, grid).values - direct).max())
    s = lambda lab: np.cos(0.4 * lab.key[0]) + 0.1 * lab.key[0] ** 2
    sig = multiplier_symbol(s, 0.0, group="torus")
    fam = torus_difference_family(1)
    back = difference_apply(fam[0], sig, duals)
    err_diff = max(abs(back.at(irr.label)[0, 0] - (s(IrrepLabel("torus", (irr.label.key[0] - 1,)))
                                                    - s(irr.label))) for irr in duals)
    fam_m = torus_difference_family(1, sign=-1)
    fwd = difference_apply(fam_m[0], sig, duals)
    err_fdiff = max(abs(fwd.at(irr.label)[0, 0] - (s(IrrepLabel("torus", (irr.label.key[0] + 1,)))
                                                    - s(irr.label))) for irr in duals)
    P = rng.uniform(0, 2 * np.pi, (50, 1))
    Q = rng.uniform(0, 2 * np.pi, (50, 1))
    kern = kernel_many(sig, P, Q, duals)
    kdirect = sum(s(irr.label) * np.exp(1j * irr.label.key[0] * (P[:, 0] - Q[:, 0])) for irr in duals)
    err_kernel = float(np.abs(kern - kdirect).max())
    errs = {"forward_vs_fft": float(err_fwd), "inverse_vs_direct": err_inv,
            "difference_backward": float(err_diff), "difference_forward": float(err_fdiff),
            "kernel_vs_direct": err_kernel, "max_frequency": K}
    passed = max(v for k, v in errs.items() if k != "max_frequency") <= cfg["tol"]
    return errs, passed, {"tol": cfg["tol"]}, {}


_RUNNERS = {
    "weyl": _check_weyl,
    "kernel_decay": _check_kernel_decay,
    "hormander_small_R": _check_hormander_small,
    "hormander_large_R": _check_hormander_large,
    "l2_bound": _check_l2_bound,
    "weak11": _check_weak11,
    "atoms_h1": _check_atoms,
    "bmo_linfty": _check_bmo,
    "lp_lemma": _check_lp_lemma,
    "cz_properties": _check_cz,
    "smoothing_lemma": _check_smoothing,
    "exactness": _check_exactness,
    "subelliptic": _check_subelliptic,
    "torus_oracle": _check_torus,
}
