"""Hormander kernel-condition integrals for the critical test symbol.

The symbol has order -3/4 and type (1/2, 0), the endpoint class for weak (1,1).
The integral over the exterior of the excluded ball stays bounded as R shrinks
through 2^-1 .. 2^-5, and it stays stable when the cutoff and grid are doubled.

Usage:
    python3 demos/hormander_sweep.py
"""
from __future__ import annotations

from compact_psido import run_check


def main():
    rep = run_check("hormander_small_R")
    m = rep.measured
    print(f"{'R':>8}  {'integral':>10}  {'doubled':>10}")
    for R, a, b in zip(m["radii"], m["values"], m["values_doubled"]):
        print(f"{R:>8.4f}  {a:>10.5f}  {b:>10.5f}")
    print(f"max/min band {m['band']:.3f}, change under doubling {m['relative_change']:.3%}, "
          f"{'PASS' if rep.passed else 'FAIL'} in {rep.runtime:.1f}s")


if __name__ == "__main__":
    main()
