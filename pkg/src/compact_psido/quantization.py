"""Global quantization, kernels, Hormander integrals and operator norms.

``Op(sigma) f(x) = sum_zeta d_zeta Tr(zeta(x) sigma(x, zeta) fhat(zeta))`` with
kernel ``K(x, y) = sum_zeta d_zeta Tr(zeta(y^-1 x) sigma(x, zeta))``.  For
multipliers ``K(x, y) = k(y^-1 x)`` where ``k`` is the inverse transform of
the symbol, and left translates of ``k`` have coefficients
``sigma(zeta) zeta(w)^*``, so kernel differences reduce to two inverse
transforms on a product grid.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .fourier import (CHUNK, FourierCoefficients, GridFunction, forward, inverse_many,
                      inverse_on_grid, random_coefficients, realify)
from .function_spaces import lp_norm
from .group_geometry import GroupPoint, QuadratureGrid
from .symbol_calculus import CutoffProfile, Symbol, build_cutoff, dyadic_weight
from .unitary_dual import evaluate_many


def _labels(duals):
    return [getattr(irr, "label", irr) for irr in duals]


# --------------------------------------------------------------------------
# applying operators
# --------------------------------------------------------------------------

def apply_multiplier(sigma: Symbol, coeffs: FourierCoefficients) -> FourierCoefficients:
    """Coefficients of ``Op(sigma) f`` for a multiplier: ``sigma(zeta) fhat(zeta)``."""
    return coeffs.map(lambda lab, M: sigma.at(lab) @ M)


def quantize_apply(sigma: Symbol, f: GridFunction, duals) -> GridFunction:
    """Grid values of ``Op(sigma) f`` truncated to ``duals``."""
    fhat = forward(f, duals)
    return quantize_coefficients(sigma, fhat, f.grid)


def quantize_coefficients(sigma: Symbol, fhat: FourierCoefficients, grid: QuadratureGrid) -> GridFunction:
    if sigma.zero:
        return GridFunction(grid, np.zeros(grid.size, complex))
    if sigma.x_independent:
        return inverse_on_grid(apply_multiplier(sigma, fhat), grid)
    out = np.zeros(grid.size, complex)
    for lab, M in fhat.blocks.items():
        for s in range(0, grid.size, CHUNK):
            P = grid.nodes[s:s + CHUNK]
            D = evaluate_many(lab, P)
            S = sigma.at(lab, P)
            out[s:s + CHUNK] += lab.dim * np.einsum("nij,njk,ki->n", D, S, M)
    return GridFunction(grid, out)


def adjoint_coefficients(sigma: Symbol, g: GridFunction, duals) -> FourierCoefficients:
    """Coefficients of ``Op(sigma)^* g`` projected on ``duals``:
    ``int g(x) sigma(x, zeta)^* zeta(x)^* dx``."""
    labels = _labels(duals)
    if sigma.x_independent or sigma.zero:
        ghat = forward(g, labels)
        return ghat.map(lambda lab, M: sigma.at(lab).conj().T @ M)
    grid = g.grid
    wg = grid.weights * g.values
    out = {}
    for lab in labels:
        acc = np.zeros((lab.dim, lab.dim), complex)
        for s in range(0, grid.size, CHUNK):
            P = grid.nodes[s:s + CHUNK]
            D = evaluate_many(lab, P)
            S = sigma.at(lab, P)
            acc += np.einsum("n,nji,nkj->ik", wg[s:s + CHUNK], S.conj(), D.conj())
        out[lab] = acc
    return FourierCoefficients(out)


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KernelSlice:
    """Values ``K(x, y_i)`` for a fixed base point ``x``."""

    x: GroupPoint
    nodes: np.ndarray
    values: np.ndarray
    cutoff: float | None = None
    t: float | None = None

    def distances(self) -> np.ndarray:
        return self.x.group.distance(self.nodes, self.x.data)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["distance", "abs_K", "re_K", "im_K"])
        for d, v in zip(self.distances(), self.values):
            w.writerow([f"{d:.12g}", f"{abs(v):.12g}", f"{v.real:.12g}", f"{v.imag:.12g}"])
        return buf.getvalue()


def _effective_multiplier(sigma: Symbol, labels, t=None, phi=None, t_cap=None) -> FourierCoefficients:
    """Blocks of ``sigma_t`` (one dyadic piece), of ``int_1^T sigma_t dt/t``
    when ``t_cap`` is given, or of ``sigma`` itself."""
    if t is not None:
        phi = phi or build_cutoff()
        return FourierCoefficients({lab: float(phi(lab.weight / t)) * sigma.at(lab) for lab in labels})
    if t_cap is not None:
        phi = phi or build_cutoff()
        return FourierCoefficients({lab: dyadic_weight(lab.weight, t_cap, phi) * sigma.at(lab)
                                    for lab in labels})
    return sigma.blocks(labels)


def kernel_many(sigma: Symbol, x_payloads, y_payloads, duals, t=None, phi=None, t_cap=None) -> np.ndarray:
    """``K(x_i, y_i)`` (or ``K_t``) for paired stacks of points."""
    labels = _labels(duals)
    X = np.atleast_2d(np.asarray(x_payloads, float))
    Y = np.atleast_2d(np.asarray(y_payloads, float))
    X, Y = np.broadcast_arrays(X, Y)
    group = _group_of(labels)
    U = group.compose(group.inverse(Y), X)
    if sigma.x_independent or sigma.zero:
        blocks = _effective_multiplier(sigma, labels, t, phi, t_cap)
        return inverse_many(blocks, U)
    phi = phi or build_cutoff()
    out = np.zeros(len(U), complex)
    for lab in labels:
        if t is not None:
            fac = float(phi(lab.weight / t))
        elif t_cap is not None:
            fac = dyadic_weight(lab.weight, t_cap, phi)
        else:
            fac = 1.0
        if fac == 0.0:
            continue
        D = evaluate_many(lab, U)
        S = sigma.at(lab, X)
        out += fac * lab.dim * np.einsum("nij,nji->n", D, S)
    return out


def _group_of(labels):
    from .group_geometry import SU2, Torus
    lab = labels[0]
    return SU2 if lab.group == "su2" else Torus(len(lab.key))


def kernel_eval(sigma: Symbol, x: GroupPoint, y: GroupPoint, duals, t=None, phi=None, t_cap=None) -> complex:
    """``K(x, y)``; with ``t`` the dyadic kernel ``K_t``; with ``t_cap`` the
    t-integral ``int_1^T K_t dt/t``."""
    return complex(kernel_many(sigma, x.data[None], y.data[None], duals, t, phi, t_cap)[0])


def kernel_slice(sigma: Symbol, x: GroupPoint, nodes, duals, t=None, phi=None, t_cap=None,
                 cutoff=None) -> KernelSlice:
    nodes = np.atleast_2d(np.asarray(nodes, float))
    vals = kernel_many(sigma, x.data[None], nodes, duals, t, phi, t_cap)
    return KernelSlice(x, nodes, vals, cutoff, t)


def radial_nodes(radii, direction=(0.0, 0.0, 1.0)):
    """``exp_map(r v)`` for a fixed unit direction ``v`` (SU(2))."""
    from .group_geometry import SU2
    v = np.asarray(direction, float)
    v = v / np.linalg.norm(v)
    return SU2.exp(np.asarray(radii, float)[:, None] * v[None, :])


def decay_slope(sigma: Symbol, duals, r_min=0.05, r_max=0.5, n=24, direction=(0.3, -0.5, 0.8)) -> dict:
    """Least-squares slope of ``log |K(e, y)|`` against ``log |y|``."""
    from .group_geometry import SU2, identity
    radii = np.geomspace(r_min, r_max, n)
    sl = kernel_slice(sigma, identity(SU2), radial_nodes(radii, direction), duals)
    y = np.log(np.abs(sl.values))
    slope, icpt = np.polyfit(np.log(radii), y, 1)
    return {"slope": float(slope), "intercept": float(icpt), "radii": radii,
            "abs_K": np.abs(sl.values), "slice": sl}


# --------------------------------------------------------------------------
# Hormander integrals
# --------------------------------------------------------------------------

def excluded_radius(R: float, rho: float) -> float:
    """Radius of the excluded ball: ``2 R^rho`` for ``R < 1``, ``2 R`` otherwise."""
    return 2.0 * R ** rho if R < 1 else 2.0 * R


def smoothed_exterior(dist, r0, h):
    """Indicator of ``dist >= r0`` with a linear ramp of width ``h``."""
    return np.clip((dist - r0) / h + 0.5, 0.0, 1.0)


def hormander_integral(sigma: Symbol, z: GroupPoint, y: GroupPoint, R: float, duals,
                       grid: QuadratureGrid, t_cap=None, phi: CutoffProfile | None = None,
                       smooth: bool = True) -> float:
    """``int_{B(z, r0)^c} |K(x, y) - K(x, z)| dx``, ``r0`` from :func:`excluded_radius`.

    The kernel is assembled from dyadic pieces, ``int_1^T K_t dt/t``, with
    ``T = t_cap`` (default ``max <zeta>``: only dyadic pieces fully resolved
    by the truncated dual contribute).
    """
    group = z.group
    if group.distance(z.data, y.data) > R * (1 + 1e-12):
        raise ValueError("y must lie in the closed ball B(z, R)")
    r0 = excluded_radius(R, sigma.rho)
    if r0 >= group.diameter or sigma.zero:
        return 0.0
    labels = _labels(duals)
    T = t_cap if t_cap is not None else max(lab.weight for lab in labels)
    phi = phi or build_cutoff()
    h = grid.spacing if smooth else 1e-300
    if sigma.x_independent:
        # x = z u:  |k(w^-1 u) - k(u)| with w = z^-1 y
        blocks = _effective_multiplier(sigma, labels, t_cap=T, phi=phi)
        w = group.compose(group.inverse(z.data), y.data)
        shifted = blocks.map(lambda lab, M: M @ evaluate_many(lab, w[None])[0].conj().T)
        k = inverse_on_grid(blocks, grid).values
        kw = inverse_on_grid(shifted, grid).values
        mask = smoothed_exterior(grid.distances_to(group.identity()), r0, h)
        return float(np.sum(grid.weights * mask * np.abs(kw - k)))
    Ky = kernel_many(sigma, grid.nodes, y.data[None], labels, t_cap=T, phi=phi)
    Kz = kernel_many(sigma, grid.nodes, z.data[None], labels, t_cap=T, phi=phi)
    mask = smoothed_exterior(grid.distances_to(z), r0, h)
    return float(np.sum(grid.weights * mask * np.abs(Ky - Kz)))


# --------------------------------------------------------------------------
# operator norms
# --------------------------------------------------------------------------

def _coef_dot(a: FourierCoefficients, b: FourierCoefficients) -> complex:
    return sum(lab.dim * np.vdot(a[lab], b[lab]) for lab in a.blocks)


def l2_operator_norm(sigma: Symbol, duals, grid: QuadratureGrid | None = None, seed=0,
                     max_iter=50, rtol=1e-8) -> float:
    """Power iteration on ``Op(sigma)^* Op(sigma)`` over the band-limited subspace."""
    labels = _labels(duals)
    v = random_coefficients(labels, seed)
    v = v.scale(1.0 / np.sqrt(_coef_dot(v, v).real))
    lam_old = None
    lam = 0.0
    for _ in range(max_iter):
        if sigma.x_independent or sigma.zero:
            w = v.map(lambda lab, M: sigma.at(lab).conj().T @ (sigma.at(lab) @ M))
        else:
            Av = quantize_coefficients(sigma, v, grid)
            w = adjoint_coefficients(sigma, Av, labels)
        lam = float(_coef_dot(v, w).real)
        nw = np.sqrt(_coef_dot(w, w).real)
        if nw == 0:
            return 0.0
        v = w.scale(1.0 / nw)
        if lam_old is not None and abs(lam - lam_old) <= rtol * abs(lam):
            break
        lam_old = lam
    return float(np.sqrt(max(lam, 0.0)))


def lp_ratio_samples(sigma: Symbol, p: float, q: float, duals, grid: QuadratureGrid,
                     trials: int = 20, seed=0, decay: float = 1.0) -> np.ndarray:
    """``||Op(sigma) f||_q / ||f||_p`` over random real band-limited ``f``."""
    labels = _labels(duals)
    out = []
    for k in range(trials):
        fhat = random_coefficients(labels, seed=1000 * int(seed) + k, decay=decay, real=True)
        f = inverse_on_grid(fhat, grid)
        Af = quantize_coefficients(sigma, fhat, grid)
        out.append(lp_norm(Af, q) / lp_norm(f, p))
    return np.array(out)


def operator_norm_estimate(sigma: Symbol, p: float, q: float, duals, grid: QuadratureGrid | None = None,
                           trials: int = 20, seed=0) -> float:
    """``L^p -> L^q`` norm estimate: power iteration for ``p = q = 2``,
    otherwise the largest ratio over randomized band-limited inputs."""
    if not (1 <= p <= np.inf and 1 <= q <= np.inf):
        raise ValueError("exponents must lie in [1, inf]")
    if p == 2 and q == 2:
        return l2_operator_norm(sigma, duals, grid, seed)
    if grid is None:
        raise ValueError("a grid is needed for p != 2 or q != 2")
    return float(lp_ratio_samples(sigma, p, q, duals, grid, trials, seed).max())
