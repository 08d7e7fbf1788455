import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compact_psido import fourier as F
from compact_psido.group_geometry import SU2, QuadratureGrid, Torus, haar_grid
from compact_psido.unitary_dual import IrrepLabel, character, enumerate_dual, evaluate_many

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def _unstructured(grid):
    """Same nodes and weights without the product structure (general path)."""
    return QuadratureGrid(grid.group, grid.nodes, grid.weights, grid.resolution, grid.exactness_degree)


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_round_trip_and_parseval(seed):
    grid = haar_grid(8)
    duals = enumerate_dual(6)
    c = F.random_coefficients(duals, seed=seed, decay=0.5)
    f = F.inverse_on_grid(c, grid)
    back = F.forward(f, duals)
    assert back.max_abs_diff(c) < 1e-12
    assert abs(F.spectral_l2_norm(c) - f.l2_norm()) < 1e-12


def test_character_coefficients_are_scaled_identity():
    # Schur: int chi_l conj(zeta_l') = delta_{l l'} I / d
    grid = haar_grid(8)
    duals = enumerate_dual(6)
    lab = IrrepLabel("su2", 3)
    f = F.GridFunction(grid, character(lab, grid.nodes))
    fh = F.forward(f, duals)
    for l2 in fh.labels:
        target = np.eye(l2.dim) / l2.dim if l2 == lab else np.zeros((l2.dim, l2.dim))
        assert np.allclose(fh[l2], target, atol=1e-14)


def test_product_and_general_paths_agree():
    grid = haar_grid(6)
    duals = enumerate_dual(5)
    c = F.random_coefficients(duals, seed=4)
    f = F.inverse_on_grid(c, grid)
    g = _unstructured(grid)
    f2 = F.inverse_on_grid(c, g)
    assert np.allclose(f.values, f2.values, atol=1e-12)
    assert F.forward(f, duals).max_abs_diff(F.forward(F.GridFunction(g, f.values), duals)) < 1e-12


def test_pointwise_inverse_matches_grid():
    grid = haar_grid(5)
    c = F.random_coefficients(enumerate_dual(4), seed=2)
    f = F.inverse_on_grid(c, grid)
    from compact_psido.group_geometry import GroupPoint
    for i in (0, 17, 200):
        assert abs(F.inverse(c, GroupPoint(SU2, grid.nodes[i])) - f.values[i]) < 1e-12


def test_realify_gives_real_function():
    grid = haar_grid(6)
    c = F.random_coefficients(enumerate_dual(5), seed=9, real=True)
    assert np.abs(F.inverse_on_grid(c, grid).values.imag).max() < 1e-13


def test_per_label_seeding_is_stable():
    a = F.random_coefficients(enumerate_dual(4), seed=5)
    b = F.random_coefficients(enumerate_dual(8), seed=5)
    for lab in a.labels:
        assert np.array_equal(a[lab], b[lab])


def test_aliasing_warning():
    grid = haar_grid(3)
    f = F.GridFunction(grid, np.ones(grid.size))
    with pytest.warns(RuntimeWarning):
        F.forward(f, enumerate_dual(8))


def test_torus_forward_matches_fft():
    grid = haar_grid(16, Torus(1))
    rng = np.random.default_rng(0)
    v = rng.standard_normal(16)
    fh = F.forward(F.GridFunction(grid, v), enumerate_dual(7, Torus(1)))
    fft = np.fft.fft(v) / 16
    for lab in fh.labels:
        assert abs(fh[lab][0, 0] - fft[lab.key[0] % 16]) < 1e-14


def test_coefficient_json_roundtrip():
    c = F.random_coefficients(enumerate_dual(3), seed=1)
    doc = json.loads(c.to_json())
    assert doc["format"] == "compact-psido-coefficients"
    assert F.FourierCoefficients.from_json(c.to_json()).max_abs_diff(c) == 0.0


def test_shape_validation():
    with pytest.raises(ValueError):
        F.FourierCoefficients({IrrepLabel("su2", 2): np.zeros((2, 2))})
    with pytest.raises(ValueError):
        F.GridFunction(haar_grid(2), np.zeros(3))
