import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compact_psido import fourier as F
from compact_psido.group_geometry import SU2, QuadratureGrid, Torus, haar_grid
from compact_psido.symbol_calculus import (admissibility_report, build_cutoff, critical_test_symbol,
                                           difference_apply, difference_power, dyadic_piece,
                                           dyadic_weight, identity_symbol, multi_indices,
                                           multiplier_symbol, power_symbol, random_multiplier,
                                           reconstruct_from_dyadic, seminorm_estimate,
                                           su2_difference_family, subelliptic_symbols,
                                           torus_difference_family)
from compact_psido.unitary_dual import IrrepLabel, character, enumerate_dual


def test_difference_of_identity_vanishes():
    fam = su2_difference_family()
    duals = enumerate_dual(6)
    for q in fam.functions:
        d = difference_apply(q, identity_symbol(), duals)
        assert max(np.abs(d.at(irr.label)).max() for irr in duals) < 1e-13


def test_difference_matches_product_with_q():
    # Delta_q of the coefficients of chi_l equals the transform of q * chi_l,
    # computed here by direct quadrature on an unstructured copy of a fine grid
    fam = su2_difference_family()
    lab = IrrepLabel("su2", 3)
    duals = enumerate_dual(6)
    chi_hat = multiplier_symbol(lambda L: (L == lab) * np.ones(L.dim) / L.dim, 0.0)
    fine = haar_grid(10)
    g = QuadratureGrid(SU2, fine.nodes, fine.weights, fine.resolution, fine.exactness_degree)
    for q in fam.functions:
        route_a = difference_apply(q, chi_hat, duals)
        f = F.GridFunction(g, q(g.nodes) * character(lab, g.nodes))
        route_b = F.forward(f, duals)
        for irr in duals:
            assert np.allclose(route_a.at(irr.label), route_b[irr.label], atol=1e-13)


@pytest.mark.parametrize("sign", [1, -1])
def test_torus_difference_is_a_shift(sign):
    s = lambda lab: np.cos(0.4 * lab.key[0]) + 0.1 * lab.key[0] ** 2
    sig = multiplier_symbol(s, 0.0, group="torus")
    duals = enumerate_dual(9, Torus(1))
    d = difference_apply(torus_difference_family(1, sign)[0], sig, duals)
    for irr in duals:
        k = irr.label.key[0]
        expected = s(IrrepLabel("torus", (k - sign,))) - s(irr.label)
        assert abs(d.at(irr.label)[0, 0] - expected) < 1e-12


def test_admissibility():
    rep = admissibility_report(su2_difference_family(), n_samples=4000)
    assert rep["rank_at_identity"] == 3
    assert rep["vanish_at_e"] < 1e-15
    assert rep["min_sum_sq"] > 0


def test_subelliptic_symbols_spectra():
    S = subelliptic_symbols()
    lab = IrrepLabel("su2", 2)          # l = 1, m = 1, 0, -1
    m = np.array([1.0, 0.0, -1.0])
    assert np.allclose(np.diag(S["L"].at(lab)), 2.0)
    assert np.allclose(np.diag(S["Lsub"].at(lab)), 2.0 - m ** 2)
    assert np.allclose(np.diag(S["Z"].at(lab)), -1j * m)
    assert np.allclose(np.diag(S["heat"].at(lab)), 2.0 - m ** 2 - 1j * m)


def test_parametrices_invert_on_nonzero_entries():
    S = subelliptic_symbols()
    for op, par in (("Lsub", "parametrix_sub"), ("heat", "parametrix_heat")):
        for irr in enumerate_dual(10):
            A, P = S[op].at(irr.label), S[par].at(irr.label)
            nz = np.abs(np.diag(A)) > 0
            assert np.allclose(np.diag(A @ P)[nz], 1.0)
            assert np.all(np.diag(P)[~nz] == 0)


def test_critical_symbol_order():
    sig = critical_test_symbol()
    assert (sig.m, sig.rho, sig.delta) == (-0.75, 0.5, 0.0)
    # ||sigma|| <~ <zeta>^{-3/4}: the l = m entries are <zeta>^{1/4} / l
    vals = [np.abs(sig.at(irr.label)).max() * irr.label.weight ** 0.75 for irr in enumerate_dual(40)[1:]]
    assert max(vals) < 3.0


def test_cutoff_normalized():
    phi = build_cutoff()
    for w in (1.0, 3.7, 10.0):
        assert abs(dyadic_weight(w, 2 * w, phi) - 1.0) < 1e-12


def test_dyadic_reconstruction():
    phi = build_cutoff()
    sig = power_symbol(-1.0)
    duals = enumerate_dual(16)
    T = 16.0
    rec = reconstruct_from_dyadic(sig, duals, T, phi)
    for irr in duals:
        w = irr.label.weight
        if w <= T / 2:
            assert np.allclose(rec[irr.label], sig.at(irr.label), atol=1e-12)


def test_dyadic_piece_support():
    phi = build_cutoff()
    piece = dyadic_piece(power_symbol(0.0), 8.0, phi)
    for irr in enumerate_dual(20):
        v = np.abs(piece.at(irr.label)).max()
        if not 4.0 < irr.label.weight < 8.0:
            assert v == 0.0
    with pytest.raises(ValueError):
        dyadic_piece(power_symbol(0.0), 0.5, phi)


def test_first_difference_seminorm_of_inverse_laplacian():
    # Delta of <zeta>^{-2} gains one order: normalized seminorm is O(1)
    fam = su2_difference_family()
    duals = enumerate_dual(16)
    for alpha in multi_indices(4, 1):
        val = seminorm_estimate(power_symbol(-2.0), alpha, (), duals, fam)
        assert 0.1 < val < 3.0


def test_multi_indices_count():
    assert len(multi_indices(4, 2)) == 10 and len(multi_indices(4, 3)) == 20
    assert su2_difference_family().monomial((0, 0, 0, 0)) is None


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=20, deadline=None)
def test_random_multiplier_is_bounded(seed):
    sig = random_multiplier(seed, 0.0)
    assert max(np.abs(sig.at(irr.label)).max() for irr in enumerate_dual(12)) <= 1.0 + 1e-12
