"""Group elements, Haar quadrature, geodesic distance and balls.

Two backends are shipped: ``SU2`` (unit quaternions, with the bi-invariant
metric that makes SU(2) the unit 3-sphere, diameter pi) and ``Torus(n)``
(angle vectors with the flat metric).  All point-level operations also have
array versions on the backend objects which act on stacks of payloads of
shape ``(..., payload_size)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * np.pi


class DomainError(ValueError):
    """Raised when a point lies outside the domain of a chart."""


# --------------------------------------------------------------------------
# quaternion arithmetic
# --------------------------------------------------------------------------

def qmul(a, b):
    """Hamilton product of quaternion stacks ``a`` and ``b`` (broadcasting)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a):
    a = np.asarray(a, dtype=float)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def quat_to_su2(q):
    """2x2 special unitary matrix of a quaternion stack.

    The quaternion units map to ``i -> -i sigma_x``, ``j -> -i sigma_y`` and
    ``k -> -i sigma_z``, which is a homomorphism onto SU(2).
    """
    q = np.asarray(q, dtype=float)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    out = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = q0 - 1j * q3
    out[..., 0, 1] = -q2 - 1j * q1
    out[..., 1, 0] = q2 - 1j * q1
    out[..., 1, 1] = q0 + 1j * q3
    return out


def euler_to_quat(alpha, beta, gamma):
    """Quaternion of ``Rz(alpha) Ry(beta) Rz(gamma)`` (z-y-z Euler angles)."""
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float))
    zero = np.zeros_like(alpha)
    rz_a = np.stack([np.cos(alpha / 2), zero, zero, np.sin(alpha / 2)], axis=-1)
    ry_b = np.stack([np.cos(beta / 2), zero, np.sin(beta / 2), zero], axis=-1)
    rz_g = np.stack([np.cos(gamma / 2), zero, zero, np.sin(gamma / 2)], axis=-1)
    return qmul(qmul(rz_a, ry_b), rz_g)


# --------------------------------------------------------------------------
# backends
# --------------------------------------------------------------------------

class SU2Group:
    """SU(2) realised as unit quaternions."""

    name = "su2"
    dim = 3
    payload_size = 4
    diameter = np.pi

    def __repr__(self):
        return "SU2"

    def __eq__(self, other):
        return isinstance(other, SU2Group)

    def __hash__(self):
        return hash("su2")

    def identity(self):
        return np.array([1.0, 0.0, 0.0, 0.0])

    def normalize(self, q):
        q = np.asarray(q, dtype=float)
        return q / np.linalg.norm(q, axis=-1, keepdims=True)

    def compose(self, a, b):
        return self.normalize(qmul(a, b))

    def inverse(self, a):
        return qconj(a)

    def distance(self, a, b):
        # angle between unit 4-vectors; same value as arccos(<a,b>) but
        # accurate for nearby points
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return 2.0 * np.arctan2(np.linalg.norm(a - b, axis=-1),
                                np.linalg.norm(a + b, axis=-1))

    def exp(self, v):
        v = np.asarray(v, dtype=float)
        theta = np.linalg.norm(v, axis=-1, keepdims=True)
        # sin(theta)/theta, stable at 0
        sinc = np.sinc(theta / np.pi)
        return np.concatenate([np.cos(theta), sinc * v], axis=-1)

    def log(self, q, tol=1e-12):
        q = np.asarray(q, dtype=float)
        vec = q[..., 1:]
        s = np.linalg.norm(vec, axis=-1, keepdims=True)
        theta = np.arctan2(s, q[..., :1])
        if np.any((np.pi - theta) < tol):
            raise DomainError("log_map is undefined at the antipode of the identity")
        scale = np.where(s > 0, theta / np.where(s > 0, s, 1.0), 1.0)
        return scale * vec

    def random(self, n, rng):
        g = rng.standard_normal((n, 4))
        return g / np.linalg.norm(g, axis=-1, keepdims=True)

    def ball_volume(self, radius):
        """Closed-form normalized Haar volume of a geodesic ball (test oracle)."""
        r = np.clip(np.asarray(radius, dtype=float), 0.0, np.pi)
        return (r - 0.5 * np.sin(2.0 * r)) / np.pi


class TorusGroup:
    """The flat torus of dimension ``n`` with angles in [0, 2 pi)."""

    name = "torus"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("torus dimension must be >= 1")
        self.n = int(n)
        self.dim = self.n
        self.payload_size = self.n
        self.diameter = np.pi * np.sqrt(self.n)

    def __repr__(self):
        return f"Torus({self.n})"

    def __eq__(self, other):
        return isinstance(other, TorusGroup) and other.n == self.n

    def __hash__(self):
        return hash(("torus", self.n))

    def identity(self):
        return np.zeros(self.n)

    def normalize(self, x):
        return np.mod(np.asarray(x, dtype=float), TWO_PI)

    def compose(self, a, b):
        return self.normalize(np.asarray(a, float) + np.asarray(b, float))

    def inverse(self, a):
        return self.normalize(-np.asarray(a, dtype=float))

    def distance(self, a, b):
        d = np.abs(self.normalize(np.asarray(a, float) - np.asarray(b, float)))
        d = np.minimum(d, TWO_PI - d)
        return np.sqrt(np.sum(d * d, axis=-1))

    def exp(self, v):
        return self.normalize(v)

    def log(self, x, tol=1e-12):
        x = self.normalize(x)
        v = np.where(x > np.pi, x - TWO_PI, x)
        if np.any(np.abs(np.abs(v) - np.pi) < tol):
            raise DomainError("log_map is undefined on the cut locus")
        return v

    def random(self, n, rng):
        return rng.uniform(0.0, TWO_PI, size=(n, self.n))

    def ball_volume(self, radius):
        if self.n != 1:
            raise NotImplementedError("closed-form ball volume only for n = 1")
        r = np.clip(np.asarray(radius, dtype=float), 0.0, np.pi)
        return r / np.pi


SU2 = SU2Group()


@lru_cache(maxsize=None)
def Torus(n: int = 1) -> TorusGroup:
    return TorusGroup(n)


def group_from_name(name: str, n: int = 1):
    if name == "su2":
        return SU2
    if name == "torus":
        return Torus(n)
    raise ValueError(f"unknown group backend {name!r}")


# --------------------------------------------------------------------------
# points
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupPoint:
    """An element of SU(2) (unit quaternion) or of a torus (angle vector)."""

    group: object
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=float).reshape(self.group.payload_size)
        arr = self.group.normalize(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def su2(cls, q0, q1=0.0, q2=0.0, q3=0.0):
        return cls(SU2, np.array([q0, q1, q2, q3], dtype=float))

    @classmethod
    def torus(cls, *angles):
        angles = np.atleast_1d(np.asarray(angles, dtype=float).ravel())
        return cls(Torus(len(angles)), angles)

    def __repr__(self):
        return f"GroupPoint({self.group!r}, {np.array2string(self.data, precision=6)})"

    def __mul__(self, other):
        return compose(self, other)

    def allclose(self, other, atol=1e-12):
        return self.group == other.group and bool(np.allclose(self.data, other.data, atol=atol))


def _check_same(a: GroupPoint, b: GroupPoint):
    if a.group != b.group:
        raise ValueError(f"backend mismatch: {a.group!r} vs {b.group!r}")


def identity(group) -> GroupPoint:
    return GroupPoint(group, group.identity())


def compose(a: GroupPoint, b: GroupPoint) -> GroupPoint:
    _check_same(a, b)
    return GroupPoint(a.group, a.group.compose(a.data, b.data))


def inverse(a: GroupPoint) -> GroupPoint:
    return GroupPoint(a.group, a.group.inverse(a.data))


def geodesic_distance(a: GroupPoint, b: GroupPoint) -> float:
    _check_same(a, b)
    return float(a.group.distance(a.data, b.data))


def norm(a: GroupPoint) -> float:
    """Geodesic distance to the identity, ``|a|``."""
    return float(a.group.distance(a.data, a.group.identity()))


def exp_map(v, group=SU2) -> GroupPoint:
    """Exponential map, normalized so that ``|exp_map(v)| = |v|`` for ``|v| < pi``."""
    return GroupPoint(group, group.exp(np.asarray(v, dtype=float)))


def log_map(a: GroupPoint) -> np.ndarray:
    return a.group.log(a.data)


def random_points(group, n: int, seed=None) -> np.ndarray:
    """``n`` Haar-distributed payloads, shape ``(n, payload_size)``."""
    rng = np.random.default_rng(seed)
    return group.random(n, rng)


# --------------------------------------------------------------------------
# balls and quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: GroupPoint
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")

    @property
    def group(self):
        return self.center.group

    def contains(self, payloads) -> np.ndarray:
        d = self.group.distance(np.asarray(payloads, float), self.center.data)
        return d < self.radius


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and positive weights discretizing the normalized Haar integral.

    ``exactness_degree`` is the largest spin (SU(2)) or largest frequency
    component (torus) whose matrix coefficients are integrated exactly.
    Product grids also carry their 1-D ``axes``; on SU(2) these are the Euler
    angles ``(alpha, cos_beta_nodes, gamma)`` plus the Gauss-Legendre weights.
    ``domain`` is ``None`` for grids of the whole group; for ball grids it is
    the ball and the weights sum to its volume instead of 1.
    """

    group: object
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int
    exactness_degree: float
    axes: tuple | None = None
    shape: tuple | None = None
    domain: Ball | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def is_product(self) -> bool:
        return self.shape is not None

    @property
    def spacing(self) -> float:
        """Typical geodesic node spacing."""
        return np.pi / max(self.resolution, 1)

    def point(self, i: int) -> GroupPoint:
        return GroupPoint(self.group, self.nodes[i])

    def distances_to(self, center) -> np.ndarray:
        c = center.data if isinstance(center, GroupPoint) else np.asarray(center, float)
        return self.group.distance(self.nodes, c)

    def ball_mask(self, ball: Ball) -> np.ndarray:
        return self.distances_to(ball.center) < ball.radius

    def ball_volume(self, ball: Ball) -> float:
        """Quadrature mass of ``ball``."""
        return float(np.sum(self.weights[self.ball_mask(ball)]))

    def integrate(self, values) -> complex:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def to_json(self) -> str:
        rows = np.column_stack([self.nodes, self.weights])
        return json.dumps({
            "format": "compact-psido-grid",
            "version": 1,
            "group": self.group.name,
            "n": getattr(self.group, "n", None),
            "resolution": self.resolution,
            "exactness_degree": self.exactness_degree,
            "product": self.is_product,
            "nodes": [[float(v) for v in row] for row in rows],
        })

    @classmethod
    def from_json(cls, text: str) -> "QuadratureGrid":
        doc = json.loads(text)
        if doc.get("format") != "compact-psido-grid" or doc.get("version") != 1:
            raise ValueError("not a version-1 grid document")
        group = group_from_name(doc["group"], doc.get("n") or 1)
        rows = np.asarray(doc["nodes"], dtype=float)
        if doc.get("product"):
            grid = haar_grid(doc["resolution"], group)
            if grid.nodes.shape != rows[:, :-1].shape or not np.allclose(grid.nodes, rows[:, :-1], atol=1e-12):
                raise ValueError("serialized product grid does not match its resolution")
            return grid
        return cls(group, rows[:, :-1], rows[:, -1], int(doc["resolution"]),
                   doc["exactness_degree"])


@lru_cache(maxsize=16)
def haar_grid(resolution: int, group=SU2) -> QuadratureGrid:
    """Product quadrature for the normalized Haar measure.

    SU(2): ``2N`` uniform nodes in alpha over [0, 2 pi), ``N`` Gauss-Legendre
    nodes in cos(beta) and ``4N`` uniform nodes in gamma over [0, 4 pi).
    Matrix coefficients of spin up to ``2N - 1`` integrate exactly, so
    products of two coefficients of spin ``<= N - 1/2`` do as well.

    Torus: ``N`` uniform nodes per coordinate, exact for frequencies
    ``|k_j| <= N - 1``.
    """
    n = int(resolution)
    if n < 2:
        raise ValueError("resolution must be >= 2")
    if group == SU2:
        n_a, n_b, n_g = 2 * n, n, 4 * n
        alpha = TWO_PI * np.arange(n_a) / n_a
        x, wx = np.polynomial.legendre.leggauss(n_b)
        x = x[::-1]
        wx = wx[::-1]
        beta = np.arccos(x)
        gamma = 2.0 * TWO_PI * np.arange(n_g) / n_g
        A, B, G = np.meshgrid(alpha, beta, gamma, indexing="ij")
        nodes = euler_to_quat(A, B, G).reshape(-1, 4)
        w = (np.full(n_a, 1.0 / n_a)[:, None, None]
             * (wx / 2.0)[None, :, None]
             * np.full(n_g, 1.0 / n_g)[None, None, :]).ravel()
        return QuadratureGrid(SU2, nodes, w, n, 2 * n - 1,
                              axes=(alpha, beta, gamma, wx / 2.0),
                              shape=(n_a, n_b, n_g))
    if isinstance(group, TorusGroup):
        theta = TWO_PI * np.arange(n) / n
        mesh = np.meshgrid(*([theta] * group.n), indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=-1)
        w = np.full(len(nodes), 1.0 / len(nodes))
        return QuadratureGrid(group, nodes, w, n, n - 1,
                              axes=(theta,) * group.n, shape=(n,) * group.n)
    raise ValueError(f"unsupported group {group!r}")


def ball_grid(ball: Ball, n_radial: int, n_polar: int | None = None,
              n_azimuth: int | None = None) -> QuadratureGrid:
    """Quadrature of a geodesic ball in SU(2) using exponential coordinates.

    Nodes are ``center * exp_map(r w)`` with Gauss-Legendre radii, and a
    Gauss-Legendre x uniform product rule on the direction sphere.  The
    normalized Haar density in these coordinates is ``sin(r)^2 / (2 pi^2)``.
    """
    if ball.group != SU2:
        raise ValueError("ball_grid is implemented for SU(2)")
    R = float(min(ball.radius, np.pi))
    if R <= 0:
        raise ValueError("degenerate ball")
    n_polar = n_polar or n_radial
    n_azimuth = n_azimuth or 2 * n_polar
    xr, wr = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * R * (xr + 1.0)
    wr = 0.5 * R * wr
    ct, wt = np.polynomial.legendre.leggauss(n_polar)
    phi = TWO_PI * (np.arange(n_azimuth) + 0.5) / n_azimuth
    st = np.sqrt(1.0 - ct ** 2)
    dirs = np.stack([
        (st[:, None] * np.cos(phi)[None, :]).ravel(),
        (st[:, None] * np.sin(phi)[None, :]).ravel(),
        np.repeat(ct, n_azimuth),
    ], axis=-1)
    wdir = np.repeat(wt, n_azimuth) * (TWO_PI / n_azimuth)
    v = r[:, None, None] * dirs[None, :, :]
    local = SU2.exp(v.reshape(-1, 3))
    nodes = SU2.compose(np.broadcast_to(ball.center.data, local.shape), local)
    weights = ((wr * np.sin(r) ** 2)[:, None] * wdir[None, :]).ravel() / (2.0 * np.pi ** 2)
    grid = QuadratureGrid(SU2, nodes, weights, n_radial, np.nan, domain=ball)
    # node (i, j, k) is center * exp(r_i n(theta_j, phi_k)); kept for separable transforms
    grid._cache["ball_axes"] = (r, np.arccos(ct), phi)
    return grid
