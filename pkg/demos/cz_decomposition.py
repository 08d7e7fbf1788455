"""Calderon-Zygmund decomposition of a spiky function on SU(2).

A few tall spikes over a small background are split at level ``alpha`` into a
bounded good part and mean-zero bad parts supported in cells of the tree.

Usage:
    python3 demos/cz_decomposition.py
"""
from __future__ import annotations

from compact_psido import cz_decompose, haar_grid, lp_norm
from compact_psido.verification import cz_corpus


def main():
    grid = haar_grid(10)
    f = cz_corpus(grid, 2, seed=3)[1]
    level = 5.0 * lp_norm(f, 1)
    cz = cz_decompose(f, level)
    m = cz.measured()
    print(f"level alpha = {level:.4f}, |f|_1 = {lp_norm(f, 1):.4f}")
    print(f"bad parts: {m['n_bad']}, overlap bound M = {cz.overlap_bound}")
    for k, v in sorted(m.items()):
        if k != "n_bad":
            print(f"  {k}: {v}")
    print("properties:", cz.check())


if __name__ == "__main__":
    main()
