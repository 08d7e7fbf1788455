"""Quadrature norms, weak-L1, maximal function, BMO, atoms and the
Calderon-Zygmund decomposition on a hierarchical cell tree."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .fourier import FourierCoefficients, GridFunction
from .group_geometry import SU2, Ball, GroupPoint, QuadratureGrid, TorusGroup, ball_grid
from .unitary_dual import evaluate_many, small_d_beta, wigner_D_quat


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

def lp_norm(f: GridFunction, p: float) -> float:
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float(np.dot(f.grid.weights, a ** p) ** (1.0 / p))


def weak_l1_quasinorm(f: GridFunction) -> float:
    """``sup_alpha alpha |{|f| > alpha}|``, exact over the grid's jump points.

    Just below each value ``v`` of ``|f|`` the superlevel set contains every
    node with ``|f| >= v``, so the supremum is ``max_v v * mass(|f| >= v)``.
    """
    a = np.abs(f.values)
    order = np.argsort(-a, kind="stable")
    v = a[order]
    cum = np.cumsum(f.grid.weights[order])
    last = np.searchsorted(-v, -v, side="right") - 1  # last index of each tie group
    return float(np.max(v * cum[last])) if len(v) else 0.0


def distribution_function(f: GridFunction, alpha: float) -> float:
    return float(np.sum(f.grid.weights[np.abs(f.values) > alpha]))


# --------------------------------------------------------------------------
# balls, maximal function, BMO
# --------------------------------------------------------------------------

def _distance_block(grid: QuadratureGrid, centers):
    return grid.group.distance(grid.nodes[None, :, :], np.asarray(centers, float)[:, None, :])


def ball_averages(f: GridFunction, centers, radii, chunk=256):
    """Averages of ``|f|`` over ``B(c, r)``: array ``(len(centers), len(radii))``
    plus the quadrature masses of the balls."""
    grid = f.grid
    a = np.abs(f.values)
    centers = np.atleast_2d(np.asarray(centers, float))
    avg = np.zeros((len(centers), len(radii)))
    mass = np.zeros_like(avg)
    for s in range(0, len(centers), chunk):
        D = _distance_block(grid, centers[s:s + chunk])
        for k, r in enumerate(radii):
            M = D < r
            mass[s:s + chunk, k] = M @ grid.weights
            avg[s:s + chunk, k] = (M @ (grid.weights * a)) / np.where(mass[s:s + chunk, k] > 0,
                                                                     mass[s:s + chunk, k], 1.0)
    return avg, mass


def maximal_function(f: GridFunction, ball_radii, centers=None, chunk=256) -> GridFunction:
    """Uncentered maximal function over the sampled balls ``B(c, r)``.

    ``centers`` defaults to every grid node.  Nodes covered by no sampled
    ball get 0.
    """
    if len(ball_radii) == 0:
        raise ValueError("need at least one radius")
    grid = f.grid
    centers = grid.nodes if centers is None else np.atleast_2d(np.asarray(centers, float))
    a = np.abs(f.values)
    out = np.zeros(grid.size)
    for s in range(0, len(centers), chunk):
        D = _distance_block(grid, centers[s:s + chunk])
        for r in ball_radii:
            M = D < r
            mass = M @ grid.weights
            avg = (M @ (grid.weights * a)) / np.where(mass > 0, mass, 1.0)
            cand = np.where(M, avg[:, None], 0.0).max(axis=0)
            out = np.maximum(out, cand)
    return GridFunction(grid, out)


def sample_balls(grid: QuadratureGrid, n_centers: int, radii, seed=0):
    """Random center subsample of the grid times the given radii."""
    rng = np.random.default_rng(seed)
    idx = rng.choice(grid.size, size=min(n_centers, grid.size), replace=False)
    return [Ball(grid.point(i), float(r)) for i in np.sort(idx) for r in radii]


def mean_oscillation(f: GridFunction, ball: Ball) -> float:
    grid = f.grid
    M = grid.ball_mask(ball)
    w = grid.weights[M]
    if w.sum() == 0:
        return 0.0
    v = f.values[M]
    avg = np.dot(w, v) / w.sum()
    return float(np.dot(w, np.abs(v - avg)) / w.sum())


def bmo_seminorm(f: GridFunction, balls) -> float:
    """``max`` over the sampled balls of ``(1/|B|) int_B |f - f_B|`` (a lower
    bound for the true supremum)."""
    grid = f.grid
    best = 0.0
    by_center = {}
    for b in balls:
        by_center.setdefault(b.center.data.tobytes(), (b.center, []))[1].append(b.radius)
    for center, radii in by_center.values():
        d = grid.distances_to(center)
        for r in radii:
            M = d < r
            w = grid.weights[M]
            if w.sum() == 0:
                continue
            v = f.values[M]
            avg = np.dot(w, v) / w.sum()
            best = max(best, float(np.dot(w, np.abs(v - avg)) / w.sum()))
    return best


def default_bmo_balls(grid: QuadratureGrid, n_centers=24, n_radii=10, seed=0):
    r_min = 1.5 * grid.spacing
    radii = np.geomspace(r_min, grid.group.diameter, n_radii)
    return sample_balls(grid, n_centers, radii, seed)


# --------------------------------------------------------------------------
# atoms
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Atom:
    """An H^1 atom: ``profile(payloads)`` vanishes off ``ball``; ``quad`` is the
    ball quadrature on which the cancellation and size conditions hold."""

    ball: Ball
    profile: object
    quad: QuadratureGrid
    values: np.ndarray
    volume: float
    seed: int = 0
    shape: str = "flat"

    def mean(self) -> float:
        return math.fsum(self.quad.weights * self.values) / self.volume

    def sup(self) -> float:
        return float(np.abs(self.values).max())

    def l1(self) -> float:
        return float(np.dot(self.quad.weights, np.abs(self.values)))

    def on_grid(self, grid: QuadratureGrid) -> GridFunction:
        return GridFunction(grid, self.profile(grid.nodes))

    def coefficients(self, duals) -> FourierCoefficients:
        """``ahat(zeta) = int_B a zeta^*`` by the ball quadrature."""
        wa = self.quad.weights * self.values
        labels = [getattr(irr, "label", irr) for irr in duals]
        if "ball_axes" in self.quad._cache:
            return FourierCoefficients(_ball_transform(wa, self.quad._cache["ball_axes"],
                                                       self.ball.center.data, labels))
        out = {}
        for lab in labels:
            D = evaluate_many(lab, self.quad.nodes)
            out[lab] = np.einsum("n,nji->ij", wa, D.conj())
        return FourierCoefficients(out)

    def to_json(self) -> str:
        return json.dumps({"center": self.ball.center.data.tolist(), "radius": self.ball.radius,
                           "seed": self.seed, "shape": self.shape, "volume": self.volume,
                           "sup": self.sup(), "mean": self.mean()})


def _ball_transform(wa, axes, center, labels):
    """``sum_n wa_n zeta(center u_n)^*`` on a ball grid, separably.

    With ``u = exp(r n)`` and ``n = Rz(phi) Ry(theta) e_z``,
    ``zeta(u)_ab = e^{-i(a-b)phi} sum_k d_ak(theta) d_bk(theta) e^{-2ikr}``,
    so the radial and azimuthal sums reduce to small exponential products.
    """
    r, theta, phi = axes
    W = np.asarray(wa, float).reshape(len(r), len(theta), len(phi))
    out = {}
    for lab in labels:
        j2 = lab.key
        m = j2 / 2 - np.arange(j2 + 1)
        V = np.einsum("rtp,rk->ktp", W, np.exp(-2j * np.outer(r, m)))
        pdiff = m[:, None] - m[None, :]
        # azimuthal harmonics for every difference a - b
        P = np.arange(-j2, j2 + 1)
        Wp = np.einsum("ktp,qp->ktq", V, np.exp(-1j * np.outer(P, phi)))
        d = small_d_beta(j2, theta)                       # (t, a, k)
        idx = (pdiff + j2).astype(int)                    # position of a - b in P
        S = np.empty((j2 + 1, j2 + 1), complex)
        for a in range(j2 + 1):
            # S_ab = sum_t sum_k d_ak d_bk Wp[k, t, a - b]
            S[a] = np.einsum("tk,tbk,ktb->b", d[:, a, :], d, Wp[:, :, idx[a]])
        Dz = wigner_D_quat(j2, center[None])[0]
        out[lab] = (Dz @ S).conj().T
    return out


def make_atom(z: GroupPoint, R: float, profile: str = "flat", seed=0, n_radial: int = 16) -> Atom:
    """Random atom on ``B(z, R)``.

    A random smooth function ``p`` of the exponential coordinates of
    ``z^-1 x`` is mean-corrected on the ball (``flat``: subtract the ball
    average; ``smooth``: multiply by a bump ``b`` and subtract a multiple of
    ``b``), then scaled so its largest quadrature value is ``1/|B|``.
    """
    if z.group != SU2:
        raise ValueError("atoms are implemented on SU(2)")
    if R <= 0 or R > z.group.diameter + 1e-12:
        raise ValueError("atom radius must lie in (0, diameter]")
    ball = Ball(z, float(R))
    quad = ball_grid(ball, n_radial)
    vol = float(np.sum(quad.weights))
    if vol <= 0:
        raise ValueError("degenerate ball: zero quadrature mass")
    rng = np.random.default_rng(seed)
    K = rng.standard_normal((4, 3))
    ph = rng.uniform(0, 2 * np.pi, 4)
    amp = rng.standard_normal(4)
    zc = z.data

    def coords(P):
        from .group_geometry import qconj, qmul
        local = SU2.normalize(qmul(qconj(zc), np.atleast_2d(P)))
        q0 = np.clip(local[:, 0], -1.0, 1.0)
        th = np.arccos(q0)
        s = np.linalg.norm(local[:, 1:], axis=-1)
        scale = np.where(s > 1e-300, th / np.where(s > 1e-300, s, 1.0), 1.0)
        return local[:, 1:] * scale[:, None], th

    def raw(P):
        v, th = coords(P)
        u = v / R
        p = 1.0 + sum(amp[k] * np.cos(u @ K[k] + ph[k]) for k in range(4))
        return p, th

    def bump(th):
        return np.where(th < R, (1 - (th / R) ** 2) ** 2, 0.0)

    p_q, th_q = raw(quad.nodes)
    if profile == "flat":
        c = np.dot(quad.weights, p_q) / vol
        vals = p_q - c
        corr = np.ones_like(p_q)
        shape_fn = lambda p, th: np.where(th < R, p - c, 0.0)
    elif profile == "smooth":
        b_q = bump(th_q)
        c = np.dot(quad.weights, p_q * b_q) / np.dot(quad.weights, b_q)
        vals = (p_q - c) * b_q
        corr = b_q
        shape_fn = lambda p, th: (p - c) * bump(th)
    else:
        raise ValueError("profile must be 'flat' or 'smooth'")
    s = (1.0 / vol) / np.abs(vals).max()
    vals = vals * s
    for _ in range(3):
        # remove the rounding residue of the mean, then restore the sup exactly
        shift = math.fsum(quad.weights * vals) / math.fsum(quad.weights * corr)
        vals = vals - shift * corr
        c += shift / s
        fix = (1.0 / vol) / np.abs(vals).max()
        vals = vals * fix
        s *= fix

    def fn(P):
        p, th = raw(P)
        return s * shape_fn(p, th)
    return Atom(ball, fn, quad, vals, vol, int(seed), profile)


# --------------------------------------------------------------------------
# Calderon-Zygmund decomposition
# --------------------------------------------------------------------------

@dataclass(eq=False)
class CellTree:
    """Nested partition of the grid nodes by recursive farthest-point Voronoi
    splits.  Each cell carries the smallest ball about its seed node that
    contains it."""

    grid: QuadratureGrid
    nodes: list = field(default_factory=list)     # node index arrays
    parent: list = field(default_factory=list)
    depth: list = field(default_factory=list)
    center: list = field(default_factory=list)    # node index of the seed
    radius: list = field(default_factory=list)
    children: list = field(default_factory=list)
    mass: np.ndarray | None = None
    ball_mass: np.ndarray | None = None
    branching: int = 8
    overlap: int = 0

    @property
    def size(self):
        return len(self.nodes)

    def ball(self, c) -> Ball:
        return Ball(self.grid.point(self.center[c]), self.radius[c])

    @property
    def eccentricity(self) -> float:
        """``max |parent| / |cell|`` over non-root cells."""
        r = [self.mass[self.parent[c]] / self.mass[c] for c in range(1, self.size)]
        return float(max(r)) if r else 1.0

    @property
    def ball_ratio(self) -> float:
        """``max |ball(cell)| / |cell|`` over non-root cells."""
        r = self.ball_mass[1:] / self.mass[1:]
        return float(r.max()) if len(r) else 1.0


def _embed(grid):
    """Coordinates and KD-tree options in which Euclidean distance is monotone
    in geodesic distance (chordal on SU(2), periodic on the torus)."""
    if grid.group == SU2:
        return grid.nodes, None, lambda r: 2.0 * np.sin(np.minimum(r, np.pi) / 2.0)
    return np.mod(grid.nodes, 2 * np.pi), 2 * np.pi, lambda r: r


def build_cell_tree(grid: QuadratureGrid, branching: int = 8, leaf_size: int = 1) -> CellTree:
    key = ("celltree", branching, leaf_size)
    if key in grid._cache:
        return grid._cache[key]
    g = grid.group
    tree = CellTree(grid, branching=branching)
    all_nodes = np.arange(grid.size)
    tree.nodes.append(all_nodes)
    tree.parent.append(-1)
    tree.depth.append(0)
    tree.center.append(0)
    tree.radius.append(g.diameter * (1 + 1e-9) + 1e-9)
    tree.children.append([])
    stack = [0]
    while stack:
        c = stack.pop()
        idx = tree.nodes[c]
        if len(idx) <= leaf_size:
            continue
        P = grid.nodes[idx]
        k = min(branching, len(idx))
        seeds = [0]
        dmin = g.distance(P, P[0])
        for _ in range(1, k):
            nxt = int(np.argmax(dmin))
            seeds.append(nxt)
            dmin = np.minimum(dmin, g.distance(P, P[nxt]))
        D = np.stack([g.distance(P, P[s]) for s in seeds], axis=0)
        owner = np.argmin(D, axis=0)
        for j, s in enumerate(seeds):
            sub = np.nonzero(owner == j)[0]
            if len(sub) == 0:
                continue
            r = float(D[j, sub].max())
            child = len(tree.nodes)
            tree.nodes.append(idx[sub])
            tree.parent.append(c)
            tree.depth.append(tree.depth[c] + 1)
            tree.center.append(int(idx[s]))
            tree.radius.append(r * (1 + 1e-9) + 1e-12)
            tree.children.append([])
            tree.children[c].append(child)
            stack.append(child)
    w = grid.weights
    tree.mass = np.array([w[n].sum() for n in tree.nodes])
    # ball masses and the per-depth overlap bound via a KD-tree
    coords, box, chord = _embed(grid)
    kd = cKDTree(coords, boxsize=box)
    depth = np.array(tree.depth)
    ball_mass = np.zeros(tree.size)
    cover = np.zeros(grid.size, dtype=np.int64)
    for dpt in range(1, depth.max() + 1):
        cells = np.nonzero(depth == dpt)[0]
        centers = coords[[tree.center[c] for c in cells]]
        radii = chord(np.array([tree.radius[c] for c in cells]))
        hits = kd.query_ball_point(centers, radii)
        level = np.zeros(grid.size, dtype=np.int64)
        for c, h in zip(cells, hits):
            h = np.asarray(h, dtype=np.int64)
            # keep strict inequality d < radius in geodesic terms
            if len(h):
                h = h[g.distance(grid.nodes[h], grid.nodes[tree.center[c]]) < tree.radius[c]]
            ball_mass[c] = w[h].sum()
            level[h] += 1
        cover += level
    ball_mass[0] = w.sum()
    tree.ball_mass = ball_mass
    tree.overlap = int(cover.max())
    grid._cache[key] = tree
    return tree


@dataclass(eq=False)
class CZDecomposition:
    f: GridFunction
    good: GridFunction
    bad: list                # (b_j GridFunction, Ball I_j, cell index)
    level: float
    overlap_bound: int
    constants: dict
    tree: CellTree

    @property
    def balls(self):
        return [b for _, b, _ in self.bad]

    def measured(self) -> dict:
        """Measured quantities of the six decomposition properties."""
        grid = self.f.grid
        w = grid.weights
        f1 = lp_norm(self.f, 1)
        lev = self.level
        g_inf = lp_norm(self.good, np.inf)
        g1 = lp_norm(self.good, 1)
        I_mass = [grid.ball_volume(B) for _, B, _ in self.bad]
        b_l1 = [lp_norm(b, 1) for b, _, _ in self.bad]
        means = [abs(np.dot(w, b.values)) for b, _, _ in self.bad]
        support_ok = all(np.all(b.values[~grid.ball_mask(B)] == 0) for b, B, _ in self.bad)
        total_b = sum((b.values for b, _, _ in self.bad), np.zeros(grid.size))
        cover = np.zeros(grid.size, dtype=int)
        for _, B, _ in self.bad:
            cover += grid.ball_mask(B)
        recon = float(np.max(np.abs(self.f.values - self.good.values - total_b))) if grid.size else 0.0
        return {
            "g_inf_over_level": g_inf / lev,
            "g_l1_over_f_l1": g1 / f1 if f1 else 0.0,
            "max_abs_mean_b": max(means, default=0.0),
            "support_ok": bool(support_ok),
            "max_b_l1_over_level_I": max((b / (lev * m) for b, m in zip(b_l1, I_mass)), default=0.0),
            "sum_I_times_level_over_f_l1": sum(I_mass) * lev / f1 if f1 else 0.0,
            "b_l1_over_f_l1": (float(np.dot(w, np.abs(total_b))) / f1) if f1 else 0.0,
            "sum_b_l1_over_f_l1": (sum(b_l1) / f1) if f1 else 0.0,
            "max_overlap": int(cover.max()) if len(cover) else 0,
            "reconstruction_error": recon,
            "n_bad": len(self.bad),
        }

    def check(self, mean_tol=1e-9) -> dict:
        """Pass flags of properties (1)-(6) against the recorded constants."""
        m = self.measured()
        C = self.constants
        eps = 1e-9
        flags = {
            "1": m["g_inf_over_level"] <= C["C1"] + eps and m["g_l1_over_f_l1"] <= C["C1"] + eps,
            "2": m["support_ok"] and m["max_abs_mean_b"] <= mean_tol,
            "3": m["max_b_l1_over_level_I"] <= C["C3"] + eps,
            "4": m["sum_I_times_level_over_f_l1"] <= C["C4"] + eps,
            "5": m["b_l1_over_f_l1"] <= m["sum_b_l1_over_f_l1"] + eps
                 and m["sum_b_l1_over_f_l1"] <= C["C5"] + eps,
            "6": m["max_overlap"] <= self.overlap_bound,
        }
        return {k: bool(v) for k, v in flags.items()}

    def to_json(self) -> str:
        return json.dumps({
            "level": self.level,
            "overlap_bound": self.overlap_bound,
            "constants": self.constants,
            "balls": [{"center": B.center.data.tolist(), "radius": B.radius} for B in self.balls],
            "measured": self.measured(),
        }, sort_keys=True)


def cz_decompose(f: GridFunction, level: float, branching: int = 8) -> CZDecomposition:
    """Stopping-time decomposition ``f = g + sum b_j`` at level ``alpha gamma``.

    Descends the cell tree from the root and selects the maximal cells whose
    average of ``|f|`` exceeds the level.  ``b_j`` is ``f`` minus its cell
    average on the selected cell, ``g = f - sum b_j``.
    """
    grid = f.grid
    w = grid.weights
    a = np.abs(f.values)
    total = float(np.dot(w, a)) / float(w.sum())
    if not level > total:
        raise ValueError("level must exceed the mean of |f|; below it the weak (1,1) bound is trivial")
    tree = build_cell_tree(grid, branching)
    selected = []
    stack = list(tree.children[0])
    while stack:
        c = stack.pop()
        idx = tree.nodes[c]
        avg = float(np.dot(w[idx], a[idx]) / tree.mass[c])
        if avg > level:
            selected.append(c)
        else:
            stack.extend(tree.children[c])
    selected.sort()
    good = f.values.astype(complex).copy()
    bad = []
    for c in selected:
        idx = tree.nodes[c]
        favg = np.dot(w[idx], f.values[idx]) / tree.mass[c]
        b = np.zeros(grid.size, complex)
        b[idx] = f.values[idx] - favg
        good[idx] = favg
        bad.append((GridFunction(grid, b), tree.ball(c), c))
    kappa = tree.eccentricity
    constants = {"C1": max(kappa, 1.0), "C3": 2.0 * kappa, "C4": tree.ball_ratio, "C5": 2.0,
                 "eccentricity": kappa}
    return CZDecomposition(f, GridFunction(grid, good), bad, float(level), tree.overlap,
                           constants, tree)
