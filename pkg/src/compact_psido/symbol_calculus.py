"""Matrix-valued symbols, difference operators and derivatives, seminorms.

A :class:`Symbol` maps ``(label, base points)`` to matrices.  Multipliers
(``x_independent=True``) ignore the base point and return one ``(d, d)``
matrix per label; general symbols return ``(N, d, d)`` for ``N`` payloads.

Difference operators follow the definition ``Delta_q fhat = (q f)^``: with
``r_x`` the inverse transform of ``sigma(x, .)``,

    (Delta_q sigma)(x, zeta) = int q(u) r_x(u) zeta(u)^* du.

Because each ``q`` is a finite combination of matrix coefficients, the
right-hand side at spin ``l`` only involves ``sigma`` at spins within the
reach of ``q``.  Source labels are extended by that reach so the result on
the requested labels carries no truncation error.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.integrate import quad

from .fourier import FourierCoefficients, GridFunction, forward, inverse_on_grid
from .group_geometry import SU2, Torus, haar_grid, qmul
from .unitary_dual import IrrepLabel, evaluate_many

DERIVATIVE_STEP = 1e-4


def _as_labels(duals):
    return [getattr(irr, "label", irr) for irr in duals]


@dataclass(frozen=True, eq=False)
class Symbol:
    """Symbol tagged with its declared class ``S^m_{rho, delta}``.

    ``fn(label)`` for multipliers, ``fn(label, payloads)`` otherwise.
    """

    fn: object
    m: float
    rho: float = 1.0
    delta: float = 0.0
    x_independent: bool = True
    group: str = "su2"
    descriptor: dict = field(default_factory=dict)
    zero: bool = False

    def __post_init__(self):
        if not (0.0 <= self.delta <= self.rho <= 1.0) or self.rho == 0.0 or self.delta == 1.0:
            raise ValueError(f"class parameters out of range: rho={self.rho}, delta={self.delta}")

    def at(self, label, payloads=None) -> np.ndarray:
        """``(d, d)`` for multipliers, ``(N, d, d)`` when payloads are given."""
        if self.zero:
            z = np.zeros((label.dim, label.dim), complex)
            if payloads is None:
                return z
            return np.broadcast_to(z, (len(np.atleast_2d(payloads)),) + z.shape).copy()
        if self.x_independent:
            M = _to_matrix(self.fn(label), label.dim)
            if payloads is None:
                return M
            n = len(np.atleast_2d(payloads))
            return np.broadcast_to(M, (n,) + M.shape).copy()
        if payloads is None:
            raise ValueError("x-dependent symbol needs base points")
        return np.asarray(self.fn(label, np.atleast_2d(payloads)), dtype=complex)

    def blocks(self, duals) -> FourierCoefficients:
        """Matrices of a multiplier on ``duals``."""
        if not (self.x_independent or self.zero):
            raise ValueError("blocks() needs a multiplier symbol")
        return FourierCoefficients({lab: self.at(lab) for lab in _as_labels(duals)})

    def with_class(self, m, rho=None, delta=None, **desc):
        d = dict(self.descriptor)
        d.update(desc)
        return Symbol(self.fn, m, self.rho if rho is None else rho,
                      self.delta if delta is None else delta,
                      self.x_independent, self.group, d, self.zero)

    def to_json(self) -> str:
        return json.dumps({"descriptor": self.descriptor, "m": self.m, "rho": self.rho,
                           "delta": self.delta, "x_independent": self.x_independent,
                           "group": self.group}, sort_keys=True)


def _to_matrix(val, dim) -> np.ndarray:
    arr = np.asarray(val, dtype=complex)
    if arr.ndim == 0:
        return arr * np.eye(dim, dtype=complex)
    if arr.ndim == 1:
        return np.diag(arr)
    return arr


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def multiplier_symbol(spectral_fn, m, rho=1.0, delta=0.0, group="su2", **descriptor) -> Symbol:
    """x-independent symbol from ``spectral_fn(label)``.

    The return value may be a scalar (multiple of the identity), a vector
    (diagonal in the weight basis) or a full matrix.
    """
    return Symbol(spectral_fn, m, rho, delta, True, group, descriptor or {"kind": "multiplier"})


def symbol_from_function(fn, m, rho=1.0, delta=0.0, group="su2", **descriptor) -> Symbol:
    """x-dependent symbol from ``fn(label, payloads) -> (N, d, d)``."""
    return Symbol(fn, m, rho, delta, False, group, descriptor or {"kind": "function"})


def zero_symbol(m=0.0, group="su2") -> Symbol:
    return Symbol(lambda lab: 0.0, m, 1.0, 0.0, True, group, {"kind": "zero"}, zero=True)


def identity_symbol(group="su2") -> Symbol:
    return multiplier_symbol(lambda lab: 1.0, 0.0, group=group, kind="identity")


def bessel_symbol(beta: float, group="su2") -> Symbol:
    """Symbol ``<zeta>^beta I`` of the Bessel potential ``J^beta``."""
    return multiplier_symbol(lambda lab: lab.weight ** beta, beta, group=group,
                             kind="bessel", beta=beta)


def power_symbol(m: float, declared_m: float | None = None, group="su2") -> Symbol:
    """``<zeta>^m I`` declared in ``S^{declared_m}_{1,0}``."""
    s = bessel_symbol(m, group)
    return s.with_class(m if declared_m is None else declared_m)


def multiply(a: Symbol, b: Symbol) -> Symbol:
    """Pointwise matrix product ``a(x, zeta) b(x, zeta)`` (orders add)."""
    if a.x_independent and b.x_independent:
        fn = lambda lab: a.at(lab) @ b.at(lab)
    else:
        fn = lambda lab, P: a.at(lab, P) @ b.at(lab, P)
    return Symbol(fn, a.m + b.m, min(a.rho, b.rho), max(a.delta, b.delta),
                  a.x_independent and b.x_independent, a.group,
                  {"kind": "product", "factors": [a.descriptor, b.descriptor]},
                  a.zero or b.zero)


def add(a: Symbol, b: Symbol) -> Symbol:
    if a.x_independent and b.x_independent:
        fn = lambda lab: a.at(lab) + b.at(lab)
    else:
        fn = lambda lab, P: a.at(lab, P) + b.at(lab, P)
    return Symbol(fn, max(a.m, b.m), min(a.rho, b.rho), max(a.delta, b.delta),
                  a.x_independent and b.x_independent, a.group,
                  {"kind": "sum", "terms": [a.descriptor, b.descriptor]})


def scale(a: Symbol, c: complex) -> Symbol:
    if a.x_independent:
        fn = lambda lab: c * a.at(lab)
    else:
        fn = lambda lab, P: c * a.at(lab, P)
    return Symbol(fn, a.m, a.rho, a.delta, a.x_independent, a.group,
                  {"kind": "scaled", "c": [float(np.real(c)), float(np.imag(c))], "of": a.descriptor},
                  a.zero)


def random_multiplier(seed: int, m: float = 0.0, group="su2") -> Symbol:
    """Random diagonal multiplier ``<zeta>^m u(l, i)``, ``|u| <= 1``, smooth in ``l``.

    Entries are ``exp(i a) (1 + b cos(c log <zeta>)) / 2`` with seeded random
    ``a, b, c`` per weight index, so the symbol is bounded and of order ``m``.
    """
    rng = np.random.default_rng(seed)
    a, b, c = rng.uniform(0, 2 * np.pi), rng.uniform(0.2, 0.9), rng.uniform(0.5, 2.0)

    def fn(lab):
        w = lab.weight
        i = np.arange(lab.dim)
        mm = lab.spin - i if lab.group == "su2" else np.zeros(1)
        ang = a + 0.7 * mm / w
        return w ** m * np.exp(1j * ang) * (1 + b * np.cos(c * np.log(w))) / 2
    return multiplier_symbol(fn, m, group=group, kind="random_multiplier", seed=seed)


# --------------------------------------------------------------------------
# sub-Laplacian and heat-type symbols on SU(2)
# --------------------------------------------------------------------------

Z_CONSTANT = -1.0  # d zeta(Z) = diag(i * c * m) with Z = k / 2


def _weights_m(lab):
    return lab.spin - np.arange(lab.dim)


def _safe_inverse(vals):
    vals = np.asarray(vals, dtype=complex)
    out = np.zeros_like(vals)
    nz = np.abs(vals) > 0
    out[nz] = 1.0 / vals[nz]
    return out


def subelliptic_symbols() -> dict:
    """Symbols of the Laplacian, ``Z``, the sub-Laplacian, the heat-type
    operator ``Z - X^2 - Y^2`` and the two parametrices.

    The sub-Laplacian uses the positive sign convention
    ``L_sub = -(X^2 + Y^2)``, acting on weight vectors as ``l(l+1) - m^2``.
    """
    def lap(lab):
        return lab.eigenvalue

    def zed(lab):
        return 1j * Z_CONSTANT * _weights_m(lab)

    def lsub(lab):
        return lab.eigenvalue - _weights_m(lab) ** 2 + 0j

    def heat(lab):
        return zed(lab) + lsub(lab)

    return {
        "L": multiplier_symbol(lap, 2.0, kind="laplacian"),
        "Z": multiplier_symbol(zed, 1.0, kind="Z"),
        "Lsub": multiplier_symbol(lsub, 2.0, kind="sub_laplacian"),
        "heat": multiplier_symbol(heat, 2.0, kind="heat"),
        "parametrix_sub": multiplier_symbol(lambda lab: _safe_inverse(lsub(lab)), -1.0, 0.5, 0.0,
                                            kind="parametrix_sub"),
        "parametrix_heat": multiplier_symbol(lambda lab: _safe_inverse(heat(lab)), -1.0, 0.5, 0.0,
                                             kind="parametrix_heat"),
    }


def critical_test_symbol() -> Symbol:
    """``<zeta>^{1/4}`` times the sub-Laplacian parametrix, declared in
    ``S^{-3/4}_{1/2, 0}``: the critical order ``-n(1 - rho)/2`` for ``n = 3``.
    """
    par = subelliptic_symbols()["parametrix_sub"]
    fn = lambda lab: lab.weight ** 0.25 * par.at(lab).diagonal()
    return multiplier_symbol(fn, -0.75, 0.5, 0.0, kind="critical_test")


# --------------------------------------------------------------------------
# difference operators
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DifferenceFunction:
    """A function ``q`` on the group vanishing at ``e``; ``reach`` is its
    spectral spread (largest spin on SU(2), largest frequency on the torus)."""

    name: str
    fn: object
    reach: float
    group: str = "su2"

    def __call__(self, payloads):
        return self.fn(np.atleast_2d(payloads))

    def __mul__(self, other):
        return DifferenceFunction(f"{self.name}*{other.name}",
                                  lambda P: self.fn(P) * other.fn(P),
                                  self.reach + other.reach, self.group)


@dataclass(frozen=True, eq=False)
class DifferenceFamily:
    functions: tuple
    group: str = "su2"

    def __len__(self):
        return len(self.functions)

    def __getitem__(self, i):
        return self.functions[i]

    def monomial(self, alpha) -> DifferenceFunction:
        """``prod_j q_j^{alpha_j}``; the empty product is returned as ``None``."""
        alpha = tuple(alpha)
        if len(alpha) != len(self.functions):
            raise ValueError("multi-index length does not match the family")
        factors = [q for q, a in zip(self.functions, alpha) for _ in range(a)]
        if not factors:
            return None
        return reduce(lambda a, b: a * b, factors)


def _su2_q(i, j):
    def fn(P):
        D = evaluate_many(IrrepLabel("su2", 1), P)[:, i, j]
        return D - (1.0 if i == j else 0.0)
    return DifferenceFunction(f"q{i + 1}{j + 1}", fn, 0.5, "su2")


def su2_difference_family() -> DifferenceFamily:
    """``q_ij = t^{1/2}_ij - delta_ij`` built from the fundamental representation."""
    return DifferenceFamily(tuple(_su2_q(i, j) for i in range(2) for j in range(2)), "su2")


def torus_difference_family(n: int = 1, sign: int = 1) -> DifferenceFamily:
    """``q_k = exp(sign * i x_k) - 1``."""
    def make(k):
        return DifferenceFunction(f"q{k + 1}", lambda P: np.exp(sign * 1j * P[:, k]) - 1.0, 1, "torus")
    return DifferenceFamily(tuple(make(k) for k in range(n)), "torus")


def admissibility_report(family: DifferenceFamily, group=SU2, n_samples=20000, seed=0,
                         r_min=0.05) -> dict:
    """Numerical strong-admissibility check.

    Returns the minimum of ``sum |q|^2`` over random points with ``|x| >= r_min``
    (positive means ``e`` is the only common zero there) and the rank of the
    differentials at ``e``.
    """
    rng = np.random.default_rng(seed)
    P = group.random(n_samples, rng)
    dist = group.distance(P, group.identity())
    P = P[dist >= r_min]
    total = sum(np.abs(q(P)) ** 2 for q in family.functions)
    h = 1e-6
    rows = []
    for q in family.functions:
        row = []
        for j in range(group.dim):
            v = np.zeros(group.dim)
            v[j] = h
            row.append((q(group.exp(v)[None])[0] - q(group.exp(-v)[None])[0]) / (2 * h))
        rows.append(row)
    Dq = np.array(rows)
    rank = np.linalg.matrix_rank(np.vstack([Dq.real, Dq.imag]), tol=1e-6)
    return {"min_sum_sq": float(total.min()), "rank_at_identity": int(rank),
            "dim": group.dim, "vanish_at_e": float(max(abs(q(group.identity()[None])[0])
                                                        for q in family.functions))}


def extend_labels(labels, reach):
    """Labels needed as sources for outputs on ``labels`` under a function of ``reach``."""
    labels = list(labels)
    if labels[0].group == "su2":
        top = max(lab.key for lab in labels) + int(round(2 * reach))
        return [IrrepLabel("su2", j2) for j2 in range(top + 1)]
    keys = np.array([lab.key for lab in labels])
    lo, hi = keys.min(axis=0) - int(reach), keys.max(axis=0) + int(reach)
    grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij")
    return [IrrepLabel("torus", tuple(int(v) for v in k))
            for k in np.stack([g.ravel() for g in grids], axis=-1)]


def grid_for(labels, reach, torus_n=1):
    """Smallest product grid on which ``Delta_q`` is computed exactly."""
    labels = list(labels)
    if labels[0].group == "su2":
        L = max(lab.spin for lab in labels)
        # sources reach L + reach, q adds reach, the test matrix adds L;
        # the grid integrates spin <= 2N - 1 exactly
        return haar_grid(max(2, math.ceil((2 * L + 2 * reach + 1) / 2)))
    K = max(max(abs(k) for k in lab.key) for lab in labels)
    return haar_grid(max(2, 2 * K + 2 * int(reach) + 1), Torus(torus_n))


def difference_apply(q: DifferenceFunction | None, sigma: Symbol, duals, grid=None,
                     points=None) -> Symbol:
    """``Delta_q sigma`` on the labels ``duals``.

    For multipliers the result is a multiplier tabulated on ``duals``.  For
    x-dependent symbols the result is evaluated lazily at requested points.
    """
    labels = _as_labels(duals)
    if q is None:
        return sigma
    if sigma.zero:
        return sigma
    src = extend_labels(labels, q.reach)
    if grid is None:
        grid = grid_for(labels, q.reach, len(labels[0].key) if labels[0].group == "torus" else 1)
    qv = q(grid.nodes)

    def transform(blocks):
        r = inverse_on_grid(blocks, grid)
        return forward(GridFunction(grid, qv * r.values), labels)

    desc = {"kind": "difference", "q": q.name, "of": sigma.descriptor}
    if sigma.x_independent:
        table = transform(sigma.blocks(src)).blocks

        def fn(lab):
            if lab not in table:
                raise KeyError(f"{lab} outside the labels the difference was computed on")
            return table[lab]
        return Symbol(fn, sigma.m, sigma.rho, sigma.delta, True, sigma.group, desc)

    cache = {}

    def fn_x(lab, P):
        out = []
        for p in np.atleast_2d(P):
            key = p.tobytes()
            if key not in cache:
                blocks = FourierCoefficients({s: sigma.at(s, p[None])[0] for s in src})
                cache[key] = transform(blocks).blocks
            out.append(cache[key][lab])
        return np.array(out)
    return Symbol(fn_x, sigma.m, sigma.rho, sigma.delta, False, sigma.group, desc)


def difference_power(family: DifferenceFamily, alpha, sigma: Symbol, duals, grid=None) -> Symbol:
    """``Delta^alpha sigma = Delta_{q^alpha} sigma``."""
    return difference_apply(family.monomial(alpha), sigma, duals, grid)


# --------------------------------------------------------------------------
# base-space derivatives
# --------------------------------------------------------------------------

def base_derivative_apply(j: int, sigma: Symbol, h: float = DERIVATIVE_STEP) -> Symbol:
    """Left-invariant derivative along ``t -> x exp_map(t e_j)``, central
    differences with step ``h``.  Multipliers give the zero symbol exactly."""
    desc = {"kind": "derivative", "direction": j, "of": sigma.descriptor}
    if sigma.x_independent or sigma.zero:
        return Symbol(lambda lab: 0.0, sigma.m, sigma.rho, sigma.delta, True,
                      sigma.group, desc, zero=True)
    def fn(lab, P):
        P = np.atleast_2d(P)
        if sigma.group == "su2":
            v = np.zeros(3)
            v[j] = h
            a = SU2.normalize(qmul(P, SU2.exp(v)))
            b = SU2.normalize(qmul(P, SU2.exp(-v)))
        else:
            e = np.zeros(P.shape[1])
            e[j] = h
            a, b = np.mod(P + e, 2 * np.pi), np.mod(P - e, 2 * np.pi)
        return (sigma.at(lab, a) - sigma.at(lab, b)) / (2 * h)
    return Symbol(fn, sigma.m, sigma.rho, sigma.delta, False, sigma.group, desc)


def derivative_power(beta, sigma: Symbol, h: float = DERIVATIVE_STEP) -> Symbol:
    """``d^beta sigma`` for a multi-index over the coordinate directions."""
    out = sigma
    for j, b in enumerate(beta):
        for _ in range(b):
            out = base_derivative_apply(j, out, h)
    return out


# --------------------------------------------------------------------------
# seminorms
# --------------------------------------------------------------------------

def seminorm_profile(sigma: Symbol, alpha, beta, duals, family: DifferenceFamily | None = None,
                     points=None, grid=None) -> tuple[list, np.ndarray]:
    """Per-label ``sup_x ||Delta^alpha d^beta sigma(x, zeta)||_op / <zeta>^{m - rho|a| + delta|b|}``."""
    labels = _as_labels(duals)
    if family is None:
        family = su2_difference_family() if sigma.group == "su2" else torus_difference_family(
            len(labels[0].key))
    alpha = tuple(alpha) if alpha is not None else (0,) * len(family)
    beta = tuple(beta) if beta is not None else ()
    tau = derivative_power(beta, sigma) if any(beta) else sigma
    tau = difference_power(family, alpha, tau, labels, grid) if any(alpha) else tau
    expo = sigma.m - sigma.rho * sum(alpha) + sigma.delta * sum(beta)
    vals = []
    for lab in labels:
        if tau.x_independent or tau.zero:
            M = tau.at(lab)[None]
        else:
            if points is None:
                raise ValueError("x-dependent seminorm needs sample points")
            M = tau.at(lab, points)
        nrm = max(float(np.linalg.norm(Mi, 2)) for Mi in M)
        vals.append(nrm / lab.weight ** expo)
    return labels, np.array(vals)


def seminorm_estimate(sigma: Symbol, alpha, beta, duals, family=None, points=None, grid=None) -> float:
    """Maximum of the normalized operator norm over labels (and points)."""
    return float(seminorm_profile(sigma, alpha, beta, duals, family, points, grid)[1].max())


def multi_indices(length: int, order: int):
    """All multi-indices of the given length with ``|alpha| == order``."""
    if length == 0:
        return [()] if order == 0 else []
    if length == 1:
        return [(order,)]
    out = []
    for a in range(order, -1, -1):
        out += [(a,) + rest for rest in multi_indices(length - 1, order - a)]
    return out


# --------------------------------------------------------------------------
# dyadic decomposition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffProfile:
    """Bump ``exp(-kappa / (1 - u^2))``, ``u = 4 s - 3``, supported in [1/2, 1]
    and normalized so that ``int_1^2 phi(1/t) dt/t = 1``."""

    kappa: float = 1.0
    norm: float = 1.0

    def raw(self, s):
        s = np.asarray(s, dtype=float)
        u = 4.0 * s - 3.0
        inside = np.abs(u) < 1.0
        safe = np.where(inside, 1.0 - u * u, 1.0)
        return np.where(inside, np.exp(-self.kappa / safe), 0.0)

    def __call__(self, s):
        return self.raw(s) / self.norm


def build_cutoff(kappa: float = 1.0) -> CutoffProfile:
    raw = CutoffProfile(kappa, 1.0)
    val, _ = quad(lambda s: float(raw.raw(s)) / s, 0.5, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return CutoffProfile(kappa, val)


def dyadic_weight(weight: float, T: float, phi: CutoffProfile) -> float:
    """``int_1^T phi(weight / t) dt / t`` by adaptive quadrature."""
    lo, hi = max(1.0, weight), min(T, 2.0 * weight)
    if hi <= lo:
        return 0.0
    val, _ = quad(lambda t: float(phi(weight / t)) / t, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def dyadic_piece(sigma: Symbol, t: float, phi: CutoffProfile) -> Symbol:
    """``sigma_t(x, zeta) = sigma(x, zeta) phi(<zeta>/t)``."""
    if t < 1:
        raise ValueError("dyadic parameter t must be >= 1")
    desc = {"kind": "dyadic", "t": t, "of": sigma.descriptor}
    if sigma.x_independent:
        fn = lambda lab: float(phi(lab.weight / t)) * sigma.at(lab)
    else:
        fn = lambda lab, P: float(phi(lab.weight / t)) * sigma.at(lab, P)
    return Symbol(fn, sigma.m, sigma.rho, sigma.delta, sigma.x_independent, sigma.group, desc,
                  sigma.zero)


def dyadic_support(t: float, label) -> bool:
    return t / 2 <= label.weight <= t


def reconstruct_from_dyadic(sigma: Symbol, duals, T: float, phi: CutoffProfile) -> FourierCoefficients:
    """``int_1^T sigma_t dt/t`` on ``duals`` (t-integral by adaptive quadrature)."""
    labels = _as_labels(duals)
    return FourierCoefficients({lab: dyadic_weight(lab.weight, T, phi) * sigma.at(lab)
                                for lab in labels})
