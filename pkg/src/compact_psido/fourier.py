"""Group Fourier transform, Peter-Weyl inversion and Parseval accounting.

Conventions::

    fhat(zeta) = int f(x) zeta(x)^* dx
    f(x)       = sum_zeta d_zeta Tr(zeta(x) fhat(zeta))
    ||f||_2^2  = sum_zeta d_zeta ||fhat(zeta)||_HS^2

On SU(2) product grids both directions are evaluated separably in the Euler
angles: the alpha and gamma sums become small exponential matrix products and
only the beta sum touches the little-d tables.  Arbitrary node sets fall back
to direct evaluation of the Wigner matrices.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .group_geometry import SU2, GroupPoint, QuadratureGrid
from .unitary_dual import Irrep, IrrepLabel, evaluate_many, small_d_beta

CHUNK = 8192


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid, fn):
        """``fn`` maps a ``(N, payload)`` array of nodes to ``N`` values."""
        return cls(grid, np.asarray(fn(grid.nodes)))

    def integral(self) -> complex:
        return complex(np.dot(self.grid.weights, self.values))

    def mean(self) -> complex:
        return self.integral() / float(np.sum(self.grid.weights))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.dot(self.grid.weights, np.abs(self.values) ** 2)))

    def __add__(self, other):
        return GridFunction(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - _vals(other))

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * _vals(other))

    __rmul__ = __mul__


def _vals(other):
    return other.values if isinstance(other, GridFunction) else other


@dataclass(eq=False)
class FourierCoefficients:
    """Finite map from irrep labels to square complex matrices."""

    blocks: dict = field(default_factory=dict)
    cutoff: float | None = None

    def __post_init__(self):
        for lab, m in list(self.blocks.items()):
            m = np.asarray(m, dtype=complex)
            if m.shape != (lab.dim, lab.dim):
                raise ValueError(f"block for {lab} has shape {m.shape}, expected {(lab.dim, lab.dim)}")
            self.blocks[lab] = m

    @property
    def labels(self):
        return sorted(self.blocks, key=lambda lab: (lab.weight, lab.key))

    def __getitem__(self, label):
        return self.blocks[label]

    def get(self, label, default=None):
        return self.blocks.get(label, default)

    def __contains__(self, label):
        return label in self.blocks

    def __len__(self):
        return len(self.blocks)

    def max_spin(self) -> float:
        return max((lab.spin for lab in self.blocks), default=0.0)

    def map(self, fn) -> "FourierCoefficients":
        """Apply ``fn(label, matrix)`` to every block."""
        return FourierCoefficients({lab: fn(lab, m) for lab, m in self.blocks.items()}, self.cutoff)

    def __add__(self, other):
        labels = set(self.blocks) | set(other.blocks)
        out = {}
        for lab in labels:
            z = np.zeros((lab.dim, lab.dim), complex)
            out[lab] = self.blocks.get(lab, z) + other.blocks.get(lab, z)
        return FourierCoefficients(out, self.cutoff)

    def __sub__(self, other):
        return self + other.map(lambda lab, m: -m)

    def scale(self, c):
        return self.map(lambda lab, m: c * m)

    def max_abs_diff(self, other) -> float:
        d = self - other
        return max((float(np.abs(m).max()) for m in d.blocks.values()), default=0.0)

    def to_json(self) -> str:
        return json.dumps({
            "format": "compact-psido-coefficients",
            "version": 1,
            "cutoff": self.cutoff,
            "blocks": [
                {"label": lab.to_json(),
                 "real": self.blocks[lab].real.ravel().tolist(),
                 "imag": self.blocks[lab].imag.ravel().tolist()}
                for lab in self.labels
            ],
        })

    @classmethod
    def from_json(cls, text: str) -> "FourierCoefficients":
        doc = json.loads(text)
        if doc.get("format") != "compact-psido-coefficients":
            raise ValueError("not a coefficient document")
        blocks = {}
        for entry in doc["blocks"]:
            lab = IrrepLabel.from_json(entry["label"])
            m = np.asarray(entry["real"]) + 1j * np.asarray(entry["imag"])
            blocks[lab] = m.reshape(lab.dim, lab.dim)
        return cls(blocks, doc.get("cutoff"))


def _labels(duals):
    return [irr.label if isinstance(irr, Irrep) else irr for irr in duals]


# --------------------------------------------------------------------------
# separable machinery on SU(2) product grids
# --------------------------------------------------------------------------

def _dtable(grid: QuadratureGrid, j2: int):
    key = ("d", j2)
    if key not in grid._cache:
        grid._cache[key] = small_d_beta(j2, grid.axes[1])
    return grid._cache[key]


def _phase_tables(grid: QuadratureGrid, P: int):
    key = ("E", P)
    if key not in grid._cache:
        alpha, _, gamma, _ = grid.axes
        p = np.arange(-P, P + 1)
        grid._cache[key] = (np.exp(0.5j * p[:, None] * alpha[None, :]),
                            np.exp(0.5j * p[:, None] * gamma[None, :]))
    return grid._cache[key]


def _block_index(j2: int, P: int):
    return P + j2 - 2 * np.arange(j2 + 1)


def _forward_product(values, grid, labels):
    n_a, n_b, n_g = grid.shape
    P = max(lab.key for lab in labels)
    Ea, Eg = _phase_tables(grid, P)
    f = np.asarray(values).reshape(n_a, n_b, n_g)
    T1 = np.einsum("pa,abc->pbc", Ea, f, optimize=True)
    F = np.einsum("pbc,qc->bpq", T1, Eg, optimize=True) / (n_a * n_g)
    wb = grid.axes[3]
    out = {}
    for lab in labels:
        idx = _block_index(lab.key, P)
        Fl = F[:, idx][:, :, idx]
        d = _dtable(grid, lab.key)
        out[lab] = np.einsum("b,bji,bji->ij", wb, d, Fl)
    return out


def _inverse_product(coeffs, grid):
    n_a, n_b, n_g = grid.shape
    labels = [lab for lab in coeffs.blocks]
    if not labels:
        return np.zeros(grid.size, complex)
    P = max(lab.key for lab in labels)
    Ea, Eg = _phase_tables(grid, P)
    G = np.zeros((n_b, 2 * P + 1, 2 * P + 1), complex)
    for lab in labels:
        idx = _block_index(lab.key, P)
        d = _dtable(grid, lab.key)
        G[np.ix_(np.arange(n_b), idx, idx)] += lab.dim * d * coeffs[lab].T[None]
    vals = np.einsum("pa,bpq,qc->abc", Ea.conj(), G, Eg.conj(), optimize=True)
    return vals.ravel()


# --------------------------------------------------------------------------
# public transforms
# --------------------------------------------------------------------------

def forward(f: GridFunction, duals, cutoff=None) -> FourierCoefficients:
    """Quadrature Fourier coefficients of ``f`` on the labels ``duals``."""
    grid = f.grid
    labels = _labels(duals)
    if not labels:
        return FourierCoefficients({}, cutoff)
    if grid.group == SU2 and 2 * max(lab.spin for lab in labels) > grid.exactness_degree:
        warnings.warn("grid exactness degree is below twice the largest requested spin; "
                      "coefficients are aliased", RuntimeWarning, stacklevel=2)
    if grid.group == SU2 and grid.is_product:
        return FourierCoefficients(_forward_product(f.values, grid, labels), cutoff)
    wf = grid.weights * f.values
    out = {}
    for lab in labels:
        acc = np.zeros((lab.dim, lab.dim), complex)
        for s in range(0, grid.size, CHUNK):
            D = evaluate_many(lab, grid.nodes[s:s + CHUNK])
            acc += np.einsum("n,nji->ij", wf[s:s + CHUNK], D.conj())
        out[lab] = acc
    return FourierCoefficients(out, cutoff)


def inverse_many(coeffs: FourierCoefficients, payloads) -> np.ndarray:
    """Peter-Weyl sum at a stack of payloads."""
    payloads = np.atleast_2d(np.asarray(payloads, dtype=float))
    out = np.zeros(len(payloads), complex)
    for lab, M in coeffs.blocks.items():
        MT = lab.dim * M.T
        for s in range(0, len(payloads), CHUNK):
            D = evaluate_many(lab, payloads[s:s + CHUNK])
            out[s:s + CHUNK] += np.einsum("nij,ij->n", D, MT)
    return out


def inverse(coeffs: FourierCoefficients, x: GroupPoint) -> complex:
    """``sum d_zeta Tr(zeta(x) fhat(zeta))`` at a single point."""
    return complex(inverse_many(coeffs, x.data[None, :])[0])


def inverse_on_grid(coeffs: FourierCoefficients, grid: QuadratureGrid) -> GridFunction:
    if grid.group == SU2 and grid.is_product:
        return GridFunction(grid, _inverse_product(coeffs, grid))
    return GridFunction(grid, inverse_many(coeffs, grid.nodes))


def spectral_l2_norm(coeffs: FourierCoefficients) -> float:
    total = sum(lab.dim * float(np.sum(np.abs(M) ** 2)) for lab, M in coeffs.blocks.items())
    return float(np.sqrt(total))


def truncate(coeffs: FourierCoefficients, cutoff: float) -> FourierCoefficients:
    return FourierCoefficients({lab: M for lab, M in coeffs.blocks.items()
                                if lab.weight <= cutoff * (1 + 1e-12)}, cutoff)


def random_coefficients(duals, seed=None, decay: float = 0.0, real: bool = False) -> FourierCoefficients:
    """Random coefficients, entries scaled by ``<zeta>^(-decay)``.

    Each label draws from its own stream seeded by ``(seed, label)``, so the
    coefficients of a label do not depend on which other labels are present.
    With ``real=True`` the blocks are symmetrised so the function is real.
    """
    out = {}
    base = 0 if seed is None else int(seed)
    for lab in _labels(duals):
        if isinstance(lab.key, (int, np.integer)):
            entropy = [base, 0, int(lab.key)]
        else:
            # zigzag so negative frequencies give distinct non-negative words
            entropy = [base, 1] + [2 * k if k >= 0 else -2 * k - 1 for k in lab.key]
        rng = np.random.default_rng(entropy)
        M = (rng.standard_normal((lab.dim, lab.dim))
             + 1j * rng.standard_normal((lab.dim, lab.dim))) / np.sqrt(2 * lab.dim)
        out[lab] = M * lab.weight ** (-decay)
    coeffs = FourierCoefficients(out)
    if real:
        coeffs = realify(coeffs)
    return coeffs


def realify(coeffs: FourierCoefficients) -> FourierCoefficients:
    """Coefficients of the real part of the synthesized function."""
    out = {}
    for lab, M in coeffs.blocks.items():
        if lab.group == "su2":
            # conj(D^l) = C D^l C^{-1} with C_{ij} = (-1)^(i) delta_{i, 2l - j}
            n = lab.dim
            C = np.zeros((n, n))
            C[np.arange(n), n - 1 - np.arange(n)] = (-1.0) ** np.arange(n)
            Mc = C @ M.conj() @ C.T
            out[lab] = 0.5 * (M + Mc)
        else:
            neg = IrrepLabel("torus", tuple(-k for k in lab.key))
            other = coeffs.blocks.get(neg, np.zeros((1, 1), complex))
            out[lab] = 0.5 * (M + other.conj())
    return FourierCoefficients(out, coeffs.cutoff)
