import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from compact_psido.group_geometry import (SU2, Ball, DomainError, GroupPoint, QuadratureGrid, Torus,
                                          ball_grid, compose, euler_to_quat, exp_map,
                                          geodesic_distance, haar_grid, identity, inverse,
                                          log_map, norm, qmul, quat_to_su2, random_points)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
vec3 = st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=3, max_size=3)


def _points(seed, n=3):
    return random_points(SU2, n, seed)


def test_identity_and_inverse_trivial():
    e = identity(SU2)
    assert np.allclose(e.data, [1, 0, 0, 0])
    x = GroupPoint.su2(0.5, 0.5, 0.5, 0.5)
    assert compose(x, inverse(x)).allclose(e)


def test_quaternion_units_match_pauli():
    # i, j, k -> -i sigma_x, -i sigma_y, -i sigma_z
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]])
    for q, s in (([0, 1, 0, 0], sx), ([0, 0, 1, 0], sy), ([0, 0, 0, 1], sz)):
        assert np.allclose(quat_to_su2(np.array(q, float)), -1j * s)


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_matrix_homomorphism(seed):
    a, b = _points(seed, 2)
    assert np.allclose(quat_to_su2(qmul(a, b)), quat_to_su2(a) @ quat_to_su2(b), atol=1e-13)


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_group_laws(seed):
    a, b, c = _points(seed)
    assert np.allclose(SU2.compose(SU2.compose(a, b), c), SU2.compose(a, SU2.compose(b, c)), atol=1e-14)
    assert np.allclose(SU2.compose(SU2.inverse(a), a), SU2.identity(), atol=1e-14)


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_distance_bi_invariant_and_metric(seed):
    a, b, c = _points(seed)
    d = SU2.distance(a, b)
    assert abs(SU2.distance(SU2.compose(c, a), SU2.compose(c, b)) - d) < 1e-12
    assert abs(SU2.distance(SU2.compose(a, c), SU2.compose(b, c)) - d) < 1e-12
    assert SU2.distance(a, c) <= SU2.distance(a, b) + SU2.distance(b, c) + 1e-12
    assert 0 <= d <= math.pi + 1e-15


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_distance_matches_great_circle_oracle(seed):
    a, b = _points(seed, 2)
    oracle = math.acos(float(np.clip(np.dot(a, b), -1, 1)))
    assert abs(SU2.distance(a, b) - oracle) < 1e-7


@given(vec3)
@settings(max_examples=100, deadline=None)
def test_exp_is_isometric_and_log_inverts(v):
    v = np.asarray(v) * 1.8      # |v| <= 1.8 sqrt(3) < pi
    r = float(np.linalg.norm(v))
    x = exp_map(v)
    assert abs(norm(x) - r) < 1e-12
    assert np.allclose(log_map(x), v, atol=1e-9)


def test_log_at_antipode_raises():
    with pytest.raises(DomainError):
        log_map(GroupPoint.su2(-1.0))


def test_euler_convention():
    # Rz(a) Ry(b) Rz(g) as a product of the one-parameter subgroups
    a, b, g = 0.3, 1.2, -0.7
    rz = lambda t: np.array([math.cos(t / 2), 0, 0, math.sin(t / 2)])
    ry = lambda t: np.array([math.cos(t / 2), 0, math.sin(t / 2), 0])
    assert np.allclose(euler_to_quat(a, b, g), qmul(qmul(rz(a), ry(b)), rz(g)))


def test_haar_grid_moments():
    # uniform measure on S^3: E[q0^2] = 1/4, E[q0^4] = 1/8, E[q0^2 q1^2] = 1/24
    g = haar_grid(8)
    q = g.nodes
    assert abs(g.integrate(np.ones(g.size)) - 1) < 1e-14
    assert abs(g.integrate(q[:, 0] ** 2) - 0.25) < 1e-14
    assert abs(g.integrate(q[:, 0] ** 4) - 0.125) < 1e-14
    assert abs(g.integrate(q[:, 0] ** 2 * q[:, 1] ** 2) - 1 / 24) < 1e-14


@pytest.mark.parametrize("r", [0.1, 0.7, 1.5, 2.9, math.pi])
def test_ball_volume_closed_form_vs_quadrature(r):
    oracle, _ = quad(lambda t: (2 / math.pi) * math.sin(t) ** 2, 0, r)
    assert abs(SU2.ball_volume(r) - oracle) < 1e-13
    bg = ball_grid(Ball(identity(SU2), r), 16)
    assert abs(bg.weights.sum() - oracle) < 1e-13


def test_ball_grid_nodes_inside_ball():
    rng = np.random.default_rng(1)
    z = GroupPoint(SU2, SU2.random(1, rng)[0])
    bg = ball_grid(Ball(z, 0.8), 8)
    assert np.all(bg.distances_to(z) <= 0.8 + 1e-12)


def test_torus_wraparound():
    T = Torus(2)
    a = np.array([0.1, 6.2])
    b = np.array([6.2, 0.1])
    d = T.distance(a, b)
    assert abs(d - math.hypot(2 * math.pi - 6.1, 2 * math.pi - 6.1)) < 1e-12
    assert abs(T.diameter - math.pi * math.sqrt(2)) < 1e-15


def test_grid_json_roundtrip():
    g = haar_grid(4)
    g2 = QuadratureGrid.from_json(g.to_json())
    assert np.allclose(g2.nodes, g.nodes) and np.allclose(g2.weights, g.weights)
