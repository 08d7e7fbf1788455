"""Unitary dual of SU(2) and of the torus: labels, Wigner matrices, Weyl sums.

SU(2) irreps are labelled by twice their spin, ``j2 = 2l``.  Matrix rows and
columns are indexed by ``i = 0..2l`` with weight ``m = l - i`` (descending),
which is the convention in which the spin-1/2 matrix of a quaternion is the
quaternion's own 2x2 matrix (see :func:`group_geometry.quat_to_su2`).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.special import eval_jacobi, gammaln

from .group_geometry import SU2, GroupPoint, TorusGroup


@dataclass(frozen=True, order=True)
class IrrepLabel:
    """``group`` is ``"su2"`` (key = twice-spin) or ``"torus"`` (key = int tuple)."""

    group: str
    key: object

    def __post_init__(self):
        if self.group == "su2":
            if int(self.key) != self.key or self.key < 0:
                raise ValueError("twice-spin must be a nonnegative integer")
            object.__setattr__(self, "key", int(self.key))
        elif self.group == "torus":
            object.__setattr__(self, "key", tuple(int(k) for k in np.atleast_1d(self.key)))
        else:
            raise ValueError(f"unknown group {self.group!r}")

    @property
    def spin(self) -> float:
        return self.key / 2 if self.group == "su2" else 0.0

    @property
    def dim(self) -> int:
        return self.key + 1 if self.group == "su2" else 1

    @property
    def eigenvalue(self) -> float:
        if self.group == "su2":
            l = self.key / 2
            return l * (l + 1)
        return float(sum(k * k for k in self.key))

    @property
    def weight(self) -> float:
        return float(np.sqrt(1.0 + self.eigenvalue))

    def to_json(self):
        return {"group": self.group, "key": self.key if self.group == "su2" else list(self.key)}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["group"], doc["key"])

    def __str__(self):
        if self.group == "su2":
            return f"l={self.key // 2}" if self.key % 2 == 0 else f"l={self.key}/2"
        return f"k={self.key}"


def spin(l) -> IrrepLabel:
    """Label of spin ``l`` (``l`` may be a half-integer)."""
    j2 = 2 * l
    if abs(j2 - round(j2)) > 1e-12:
        raise ValueError("spin must be a half-integer")
    return IrrepLabel("su2", int(round(j2)))


def freq(*k) -> IrrepLabel:
    return IrrepLabel("torus", tuple(k))


@dataclass(frozen=True)
class Irrep:
    label: IrrepLabel

    @property
    def dim(self) -> int:
        return self.label.dim

    @property
    def eigenvalue(self) -> float:
        return self.label.eigenvalue

    @property
    def weight(self) -> float:
        return self.label.weight

    def evaluate(self, x: GroupPoint) -> np.ndarray:
        if (x.group == SU2) != (self.label.group == "su2"):
            raise ValueError("backend mismatch between irrep and point")
        return evaluate_many(self.label, x.data[None, :])[0]

    def evaluate_many(self, payloads) -> np.ndarray:
        return evaluate_many(self.label, payloads)


# --------------------------------------------------------------------------
# Wigner matrices
# --------------------------------------------------------------------------

def _lnbinom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


@lru_cache(maxsize=256)
def _jacobi_tables(j2: int):
    """Per-entry integer data for the Jacobi-polynomial form of little-d."""
    i = np.arange(j2 + 1)
    ip, ic = np.meshgrid(i, i, indexing="ij")  # row (m'), column (m)
    jpm, jmm, jpmp, jmmp = j2 - ic, ic, j2 - ip, ip
    k = np.minimum(np.minimum(jpm, jmm), np.minimum(jpmp, jmmp))
    first = (k == jpm) | (k == jmmp)
    diff = ic - ip  # m' - m
    a = np.where(first, diff, -diff)
    lam = np.where(first, diff, 0)
    b = j2 - 2 * k - a
    coef = np.exp(0.5 * (_lnbinom(j2 - k, k + a) - _lnbinom(k + b, b)))
    coef = coef * np.where(lam % 2 == 0, 1.0, -1.0)
    return k, a, b, coef


def wigner_small_d(j2: int, cos_half, sin_half) -> np.ndarray:
    """Little-d matrices ``d^l_{m'm}(beta)`` from ``cos(beta/2)``, ``sin(beta/2)``.

    Returns shape ``(N, 2l+1, 2l+1)`` for ``N`` input angles.
    """
    c = np.atleast_1d(np.asarray(cos_half, dtype=float))
    s = np.atleast_1d(np.asarray(sin_half, dtype=float))
    if j2 == 0:
        return np.ones((len(c), 1, 1))
    k, a, b, coef = _jacobi_tables(j2)
    x = (c * c - s * s)[:, None, None]
    with np.errstate(invalid="ignore"):
        poly = eval_jacobi(k[None], a[None], b[None], x)
        d = coef[None] * s[:, None, None] ** a[None] * c[:, None, None] ** b[None] * poly
    return d


def small_d_beta(j2: int, beta) -> np.ndarray:
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    return wigner_small_d(j2, np.cos(beta / 2), np.sin(beta / 2))


def _m_values(j2):
    return j2 / 2 - np.arange(j2 + 1)


def wigner_D_quat(j2: int, q) -> np.ndarray:
    """Spin ``j2/2`` matrices at a stack of unit quaternions, shape ``(N, d, d)``."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    A = q[:, 0] - 1j * q[:, 3]
    B = q[:, 2] + 1j * q[:, 1]
    absA, absB = np.abs(A), np.abs(B)
    d = wigner_small_d(j2, absA, absB)
    if j2 == 0:
        return d.astype(complex)
    m = _m_values(j2)
    msum = m[:, None] + m[None, :]
    mdiff = m[:, None] - m[None, :]
    phase = (np.angle(A)[:, None, None] * msum[None]
             + np.angle(B)[:, None, None] * mdiff[None])
    return np.exp(1j * phase) * d


def wigner_D_euler(j2: int, alpha, beta, gamma) -> np.ndarray:
    """``D^l(alpha, beta, gamma) = e^{-i m' alpha} d^l(beta) e^{-i m gamma}``."""
    alpha, beta, gamma = (np.atleast_1d(np.asarray(v, float)) for v in (alpha, beta, gamma))
    m = _m_values(j2)
    d = small_d_beta(j2, beta)
    return (np.exp(-1j * m[None, :, None] * alpha[:, None, None]) * d
            * np.exp(-1j * m[None, None, :] * gamma[:, None, None]))


def evaluate_many(label: IrrepLabel, payloads) -> np.ndarray:
    """Representation matrices at a stack of payloads, shape ``(N, d, d)``."""
    payloads = np.atleast_2d(np.asarray(payloads, dtype=float))
    if label.group == "su2":
        return wigner_D_quat(label.key, payloads)
    k = np.asarray(label.key, dtype=float)
    return np.exp(1j * payloads @ k)[:, None, None]


def evaluate(label: IrrepLabel, x: GroupPoint) -> np.ndarray:
    return Irrep(label).evaluate(x)


def character(label: IrrepLabel, payloads) -> np.ndarray:
    """Closed-form characters ``sin((2l+1) theta) / sin(theta)``, ``q0 = cos(theta)``."""
    payloads = np.atleast_2d(np.asarray(payloads, dtype=float))
    if label.group != "su2":
        return evaluate_many(label, payloads)[:, 0, 0]
    theta = np.arctan2(np.linalg.norm(payloads[:, 1:], axis=-1), payloads[:, 0])
    n = label.key + 1
    s = np.sin(theta)
    small = np.abs(s) < 1e-8
    safe = np.where(small, 1.0, s)
    out = np.sin(n * theta) / safe
    # limit at theta = 0 or pi
    limit = np.where(np.cos(theta) > 0, n, n * (-1.0) ** (n - 1))
    return np.where(small, limit, out)


@lru_cache(maxsize=64)
def spin_matrices(j2: int):
    """Angular momentum matrices ``(Jx, Jy, Jz)`` in the descending-weight basis."""
    j = j2 / 2
    m = _m_values(j2)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((j2 + 1, j2 + 1), dtype=complex)
    for i in range(1, j2 + 1):
        # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, with |m+1> one row up
        jp[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    return jx, jy, jz


def algebra_action(j2: int):
    """Derivatives at ``t = 0`` of ``t -> D^l(exp_map(t e_j))``, j = 1, 2, 3."""
    return tuple(-2j * J for J in spin_matrices(j2))


# --------------------------------------------------------------------------
# enumeration and Weyl sums
# --------------------------------------------------------------------------

def enumerate_dual(cutoff: float, group=SU2) -> list[Irrep]:
    """All irreps with ``<zeta> <= cutoff``, sorted by ``<zeta>``."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    bound = cutoff * cutoff - 1.0 + 1e-12
    if group == SU2:
        out = []
        j2 = 0
        while (j2 / 2) * (j2 / 2 + 1) <= bound:
            out.append(Irrep(IrrepLabel("su2", j2)))
            j2 += 1
        return out
    if isinstance(group, TorusGroup):
        r = int(np.floor(np.sqrt(bound)))
        labels = [IrrepLabel("torus", k) for k in product(range(-r, r + 1), repeat=group.n)
                  if sum(v * v for v in k) <= bound]
        labels.sort(key=lambda lab: (lab.eigenvalue, lab.key))
        return [Irrep(lab) for lab in labels]
    raise ValueError(f"unsupported group {group!r}")


def dual_up_to_spin(max_spin: float) -> list[Irrep]:
    return [Irrep(IrrepLabel("su2", j2)) for j2 in range(int(round(2 * max_spin)) + 1)]


def max_spin(duals) -> float:
    return max((irr.label.spin for irr in duals), default=0.0)


def weyl_closed_form(lam: float) -> int:
    """``sum_{<zeta> <= lam} d^2`` on SU(2) via ``D(D+1)(2D+1)/6``."""
    j2max = len(enumerate_dual(lam)) - 1
    D = j2max + 1
    return D * (D + 1) * (2 * D + 1) // 6


def weyl_sum(alpha: float, lam: float, mode: str = "head", group=SU2, cap: float | None = None) -> float:
    """Plancherel-weighted sum ``sum d^2 <zeta>^(alpha n)``.

    ``head`` sums over ``<zeta> <= lam``.  ``tail`` sums over
    ``lam < <zeta> <= cap`` (default cap ``1000 * lam``) and requires
    ``alpha < -1``; head(lam) + tail(lam) is the full capped sum.
    """
    n = group.dim
    if mode == "head":
        cut_lo, cut_hi = None, lam
    elif mode == "tail":
        if alpha >= -1:
            raise ValueError("tail sum diverges for alpha >= -1")
        cut_lo, cut_hi = lam, cap if cap is not None else 1000.0 * max(lam, 1.0)
    else:
        raise ValueError("mode must be 'head' or 'tail'")
    n_head = len(enumerate_dual(lam, group)) if cut_lo is not None else 0
    if group == SU2:
        j2 = np.arange(len(enumerate_dual(max(cut_hi, 1.0))))
        l = j2 / 2
        w = np.sqrt(1.0 + l * (l + 1))
        d = j2 + 1.0
    else:
        duals = enumerate_dual(max(cut_hi, 1.0), group)
        w = np.array([irr.weight for irr in duals])
        d = np.ones(len(duals))
    # enumeration is sorted by weight, so the head is a prefix
    w, d = w[n_head:], d[n_head:]
    return float(np.sum(d ** 2 * w ** (alpha * n)))
