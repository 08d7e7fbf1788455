"""One test per acceptance criterion, at the stated tolerances."""
import pytest

from compact_psido.verification import run_check


def _line(n, rep, detail):
    return f"criterion {n:>2} {rep.name:<18} {'PASS' if rep.passed else 'FAIL'}  {detail}"


def test_01_exactness(verdict):
    rep = run_check("exactness", {"cutoff": 8, "resolution": 16})
    m = rep.measured
    verdict(_line(1, rep, f"schur={m['schur']:.1e} parseval={m['parseval']:.1e} "
                          f"round_trip={m['round_trip_coefficients']:.1e} runtime={rep.runtime:.1f}s"))
    assert rep.passed and rep.runtime < 30


def test_02_weyl(verdict):
    rep = run_check("weyl")
    verdict(_line(2, rep, f"exact={rep.measured['exact_match']} band={rep.measured['band']:.3f} (<= 2)"))
    assert rep.passed


def test_03_kernel_decay(verdict):
    rep = run_check("kernel_decay", {"cutoff": 24})
    m = rep.measured
    verdict(_line(3, rep, f"slope={m['slope']:.3f} (target -1 +- 0.3; doubled {m['slope_doubled']:.3f}, "
                          f"continuum {m['continuum_slope']:.3f}) bounded_change={m['bounded_relative_change']:.1e}"))
    assert rep.passed


def test_04_hormander(verdict):
    small = run_check("hormander_small_R", {"cutoff": 16, "resolution": 24})
    large = run_check("hormander_large_R", {"cutoff": 16, "resolution": 24})
    ok = small.passed and large.passed
    verdict(f"criterion  4 hormander          {'PASS' if ok else 'FAIL'}  "
            f"small band={small.measured['band']:.2f} change={small.measured['relative_change']:.3f}; "
            f"large/small_min={large.measured['max_large_over_small_min']:.2f} "
            f"change={large.measured['relative_change_of_max']:.3f}")
    assert ok


def test_05_weak11(verdict):
    rep = run_check("weak11")
    verdict(_line(5, rep, f"band={rep.measured['band']:.3f} (<= 3)"))
    assert rep.passed


def test_06_atoms(verdict):
    rep = run_check("atoms_h1")
    m = rep.measured
    verdict(_line(6, rep, f"max||Ta||_1={m['max_Ta_l1']:.4f} change={m['relative_change']:.1e} (< 0.1)"))
    assert rep.passed


def test_07_bmo_and_lp(verdict):
    bmo = run_check("bmo_linfty")
    lp = run_check("lp_lemma")
    ok = bmo.passed and lp.passed
    verdict(f"criterion  7 bmo_linfty+lp      {'PASS' if ok else 'FAIL'}  "
            f"bmo={bmo.measured['max_bmo_ratio']:.3f} change={bmo.measured['relative_change']:.1e}; "
            f"L2->L4={lp.measured['max_ratio']:.3f} change={lp.measured['relative_change']:.1e}")
    assert ok


def test_08_cz(verdict):
    rep = run_check("cz_properties")
    m = rep.measured
    verdict(_line(8, rep, f"properties={m['properties']} overlap_bound={m['overlap_bound']} "
                          f"max_mean={m['worst_measured']['max_abs_mean_b']:.1e}"))
    assert rep.passed


def test_09_smoothing_lemma(verdict):
    rep = run_check("smoothing_lemma")
    m = rep.measured
    ranges = m["growth_exponent_range_by_order"]
    verdict(_line(9, rep, "sup||Delta^a sigma_t|| ~ t^e with e by |a|: "
                          + ", ".join(f"{k}:[{v[0]:.2f},{v[1]:.2f}]" for k, v in sorted(ranges.items()))
                          + f"; {len(m['failing'])} multi-indices rise"))
    assert rep.passed


def test_10_subelliptic(verdict):
    rep = run_check("subelliptic")
    m = rep.measured
    verdict(_line(10, rep, f"residual={m['max_residual']:.1e} bands={ {k: round(v, 2) for k, v in m['bands'].items()} }"))
    assert rep.passed


def test_11_torus_oracle(verdict):
    rep = run_check("torus_oracle")
    worst = max(v for k, v in rep.measured.items() if k != "max_frequency")
    verdict(_line(11, rep, f"max error={worst:.1e} (<= 1e-9)"))
    assert rep.passed
