"""Convolution kernel of <zeta>^-2 on SU(2) against the continuum Green's function.

The operator with symbol <zeta>^-2 I inverts 1 + Laplacian, so its kernel has a
closed form.  The truncated Peter-Weyl sum converges to it as the cutoff grows,
and the log-log slope over [0.05, 0.5] tends to the continuum slope.

Usage:
    python3 demos/kernel_decay.py
"""
from __future__ import annotations

import numpy as np

from compact_psido import SU2, enumerate_dual, identity, power_symbol
from compact_psido.quantization import decay_slope, kernel_slice, radial_nodes
from compact_psido.verification import continuum_kernel_inverse_laplacian


def main():
    sigma = power_symbol(-2.0)
    probe = np.array([0.2, 0.5, 1.0, 2.0])
    exact_probe = continuum_kernel_inverse_laplacian(probe)
    radii = np.geomspace(0.05, 0.5, 24)
    exact_slope = np.polyfit(np.log(radii), np.log(continuum_kernel_inverse_laplacian(radii)), 1)[0]
    print(f"continuum slope over [0.05, 0.5]: {exact_slope:.4f}")
    print(f"{'cutoff':>6}  {'slope':>8}  ratio K/K_exact at r = {probe.tolist()}")
    for cutoff in (12, 24, 48):
        duals = enumerate_dual(cutoff)
        fit = decay_slope(sigma, duals)
        sl = kernel_slice(sigma, identity(SU2), radial_nodes(probe, (0.3, -0.5, 0.8)), duals)
        ratio = np.abs(sl.values) / exact_probe
        print(f"{cutoff:>6}  {fit['slope']:>8.4f}  {np.round(ratio, 3).tolist()}")


if __name__ == "__main__":
    main()
