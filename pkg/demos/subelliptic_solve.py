"""Solve the sub-Laplacian and heat-type equations on SU(2).

For a random real band-limited right-hand side, the parametrix symbols invert
``L_sub = -(X^2 + Y^2)`` and ``Z - X^2 - Y^2`` on the orthogonal complement of
constants.  The spectral residual is at machine precision, and the weak-L1 size
of the solution is compared with the W^{1,-1/4} size of the data.

Usage:
    python3 demos/subelliptic_solve.py [seed]
"""
from __future__ import annotations

import sys

from compact_psido import enumerate_dual, haar_grid, inverse_on_grid, solve_subelliptic
from compact_psido.fourier import random_coefficients


def main(seed=7):
    duals = enumerate_dual(8)
    grid = haar_grid(16)
    f = inverse_on_grid(random_coefficients(duals, seed=seed, real=True), grid)
    print(f"grid nodes: {grid.size}, labels: {len(duals)}, seed: {seed}")
    for tag in ("sub_laplacian", "heat"):
        _, rep = solve_subelliptic(tag, f, duals)
        print(f"{tag:>14}: residual {rep['residual_l2']:.2e}  |u|_(1,inf) {rep['u_weak_l1']:.4f}  "
              f"|f|_W(1,-1/4) {rep['f_W1_minus_quarter']:.4f}  ratio {rep['ratio']:.4f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
