import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compact_psido import fourier as F
from compact_psido.function_spaces import (bmo_seminorm, build_cell_tree, cz_decompose,
                                           default_bmo_balls, distribution_function, lp_norm,
                                           make_atom, maximal_function, mean_oscillation,
                                           weak_l1_quasinorm)
from compact_psido.group_geometry import SU2, Ball, GroupPoint, haar_grid, identity
from compact_psido.unitary_dual import enumerate_dual, evaluate_many
from compact_psido.verification import cz_corpus

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def _rand(grid, seed):
    return F.GridFunction(grid, np.random.default_rng(seed).standard_normal(grid.size))


def test_norms_of_constants():
    g = haar_grid(4)
    f = F.GridFunction(g, 3.0 * np.ones(g.size))
    for p in (1, 2, 4, np.inf):
        assert abs(lp_norm(f, p) - 3.0) < 1e-13
    assert abs(weak_l1_quasinorm(f) - 3.0) < 1e-13


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_weak_l1_matches_brute_force(seed):
    g = haar_grid(3)
    f = _rand(g, seed)
    levels = np.abs(f.values)
    brute = max(a * distribution_function(f, a * (1 - 1e-12)) for a in levels)
    assert abs(weak_l1_quasinorm(f) - brute) < 1e-12
    assert weak_l1_quasinorm(f) <= lp_norm(f, 1) + 1e-12


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_maximal_function_dominates(seed):
    g = haar_grid(4)
    f = _rand(g, seed)
    Mf = maximal_function(f, [0.5, 1.5, math.pi + 0.1])
    # the ball covering the group gives at least the mean of |f|
    assert np.all(Mf.values >= lp_norm(f, 1) - 1e-12)
    assert np.all(Mf.values <= lp_norm(f, np.inf) + 1e-12)


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_bmo_bounds(seed):
    g = haar_grid(4)
    f = _rand(g, seed)
    balls = default_bmo_balls(g, 8, 5, seed=seed % 1000)
    assert bmo_seminorm(F.GridFunction(g, np.ones(g.size)), balls) < 1e-14
    assert bmo_seminorm(f, balls) <= 2 * lp_norm(f, np.inf) + 1e-12
    assert mean_oscillation(f, Ball(identity(SU2), 4.0)) <= 2 * lp_norm(f, 1) + 1e-12


@given(seeds, st.floats(0.03, math.pi), st.sampled_from(["flat", "smooth"]))
@settings(max_examples=25, deadline=None)
def test_atom_conditions(seed, R, profile):
    rng = np.random.default_rng(seed)
    z = GroupPoint(SU2, SU2.random(1, rng)[0])
    a = make_atom(z, R, profile, seed=seed)
    assert abs(a.mean()) < 1e-12
    assert abs(a.sup() * a.volume - 1.0) < 1e-12
    assert a.l1() <= 1.0 + 1e-12
    assert abs(a.volume - SU2.ball_volume(R)) < 1e-12


def test_atom_separable_coefficients_match_direct_sum():
    rng = np.random.default_rng(3)
    z = GroupPoint(SU2, SU2.random(1, rng)[0])
    a = make_atom(z, 1.3, "smooth", seed=1)
    duals = enumerate_dual(6)
    fast = a.coefficients(duals)
    wa = a.quad.weights * a.values
    for irr in duals:
        slow = np.einsum("n,nji->ij", wa, evaluate_many(irr.label, a.quad.nodes).conj())
        assert np.allclose(fast[irr.label], slow, atol=1e-14)


def test_atom_vanishes_off_ball():
    a = make_atom(identity(SU2), 0.4, "flat", seed=0)
    g = haar_grid(8)
    v = a.on_grid(g).values
    assert np.all(v[g.distances_to(identity(SU2)) >= 0.4] == 0)


def test_cell_tree_partitions_grid():
    g = haar_grid(6)
    tree = build_cell_tree(g)
    for c, kids in enumerate(tree.children):
        if kids:
            merged = np.sort(np.concatenate([tree.nodes[k] for k in kids]))
            assert np.array_equal(merged, np.sort(tree.nodes[c]))
    # every cell lies in its ball
    for c in range(len(tree.nodes)):
        d = g.distances_to(g.nodes[tree.center[c]])[tree.nodes[c]]
        assert d.max() <= tree.radius[c] + 1e-12


@pytest.mark.parametrize("k", range(6))
def test_cz_properties_on_corpus(k):
    g = haar_grid(8)
    f = cz_corpus(g, 6, seed=11)[k]
    cz = cz_decompose(f, 4.0 * lp_norm(f, 1))
    assert all(cz.check().values())
    m = cz.measured()
    assert m["reconstruction_error"] < 1e-12


def test_cz_level_must_exceed_mean():
    g = haar_grid(4)
    f = F.GridFunction(g, np.ones(g.size))
    with pytest.raises(ValueError):
        cz_decompose(f, 0.5)
