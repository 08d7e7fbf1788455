import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compact_psido.group_geometry import SU2, haar_grid, qmul, quat_to_su2, random_points
from compact_psido.unitary_dual import (IrrepLabel, algebra_action, character, enumerate_dual,
                                        evaluate_many, small_d_beta, spin, weyl_closed_form,
                                        weyl_sum, wigner_D_euler)
from compact_psido.group_geometry import euler_to_quat, SU2

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
j2s = st.integers(min_value=0, max_value=12)

# Wigner small-d at beta = 1.1, rows/columns ordered m = j, j-1, ..., -j.
# Reference values from sympy.physics.quantum.spin.Rotation.d.
D1_BETA_1_1 = np.array([
    [0.7267980607127886, -0.6301787677428021, 0.27320193928721137],
    [0.6301787677428021, 0.4535961214255773, -0.6301787677428021],
    [0.27320193928721137, 0.6301787677428021, 0.7267980607127886]])
D32_BETA_1_1 = np.array([
    [0.6196131693429456, -0.6579854286365172, 0.40341429656467725, -0.1427991645845147],
    [0.6579854286365172, 0.15379046390982587, -0.6169769641077744, 0.40341429656467725],
    [0.40341429656467725, 0.6169769641077744, 0.15379046390982587, -0.6579854286365172],
    [0.1427991645845147, 0.40341429656467725, 0.6579854286365172, 0.6196131693429456]])


def test_small_d_against_reference_tables():
    assert np.allclose(small_d_beta(2, 1.1)[0], D1_BETA_1_1, atol=1e-15)
    assert np.allclose(small_d_beta(3, 1.1)[0], D32_BETA_1_1, atol=1e-15)


def test_spin_half_is_defining_representation():
    P = random_points(SU2, 20, 3)
    assert np.allclose(evaluate_many(spin(0.5), P), quat_to_su2(P), atol=1e-14)


@given(seeds, j2s)
@settings(max_examples=40, deadline=None)
def test_homomorphism_and_unitarity(seed, j2):
    a, b = random_points(SU2, 2, seed)
    lab = IrrepLabel("su2", j2)
    Da, Db, Dab = (evaluate_many(lab, x[None])[0] for x in (a, b, qmul(a, b)))
    assert np.allclose(Da @ Db, Dab, atol=1e-12)
    assert np.allclose(Da @ Da.conj().T, np.eye(j2 + 1), atol=1e-12)


@given(seeds, j2s)
@settings(max_examples=30, deadline=None)
def test_character_closed_form_equals_trace(seed, j2):
    P = random_points(SU2, 5, seed)
    lab = IrrepLabel("su2", j2)
    assert np.allclose(character(lab, P), np.trace(evaluate_many(lab, P), axis1=1, axis2=2), atol=1e-11)


def test_euler_and_quaternion_routes_agree():
    rng = np.random.default_rng(0)
    a, b, g = rng.uniform(0, 2 * np.pi, 10), rng.uniform(0, np.pi, 10), rng.uniform(0, 4 * np.pi, 10)
    for j2 in (1, 2, 5):
        D1 = wigner_D_euler(j2, a, b, g)
        D2 = evaluate_many(IrrepLabel("su2", j2), euler_to_quat(a, b, g))
        assert np.allclose(D1, D2, atol=1e-13)


@pytest.mark.parametrize("j2", [1, 2, 3, 4])
def test_algebra_action_is_derivative(j2):
    # d/dt D(exp(t e_j)) at t=0 by central differences
    h = 1e-6
    A = algebra_action(j2)
    lab = IrrepLabel("su2", j2)
    for j in range(3):
        v = np.zeros(3)
        v[j] = h
        Dp = evaluate_many(lab, SU2.exp(v)[None])[0]
        Dm = evaluate_many(lab, SU2.exp(-v)[None])[0]
        assert np.allclose((Dp - Dm) / (2 * h), A[j], atol=1e-8)


def test_schur_orthogonality_on_grid():
    g = haar_grid(6)
    for j2 in range(5):
        D = evaluate_many(IrrepLabel("su2", j2), g.nodes).reshape(g.size, -1)
        G = (D.conj().T * g.weights) @ D
        assert np.allclose(G, np.eye((j2 + 1) ** 2) / (j2 + 1), atol=1e-13)


def test_label_arithmetic():
    lab = spin(1.5)
    assert lab.dim == 4 and lab.eigenvalue == 1.5 * 2.5
    assert abs(lab.weight - math.sqrt(1 + 3.75)) < 1e-15
    assert IrrepLabel.from_json(lab.to_json()) == lab


def test_enumerate_small_cutoff():
    assert [irr.label.spin for irr in enumerate_dual(2)] == [0.0, 0.5, 1.0]


@pytest.mark.parametrize("lam,expected", [(2, 14), (4, 140), (8, 1240), (16, 10416), (32, 85344)])
def test_weyl_sum_closed_form(lam, expected):
    # spins with l(l+1) <= lam^2 - 1 counted by hand: D = number of spins
    assert weyl_sum(0, lam) == expected == weyl_closed_form(lam)


def test_weyl_head_plus_tail_is_full_sum():
    head, tail = weyl_sum(-2, 4.0), weyl_sum(-2, 4.0, mode="tail", cap=40.0)
    assert abs(head + tail - weyl_sum(-2, 40.0)) < 1e-12
    with pytest.raises(ValueError):
        weyl_sum(-0.5, 4.0, mode="tail")
