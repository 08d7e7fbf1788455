"""Global pseudo-differential calculus on compact Lie groups.

SU(2) is the primary backend; tori give an independent scalar cross-check.
"""
from .group_geometry import (SU2, Ball, DomainError, GroupPoint, QuadratureGrid, Torus, ball_grid,
                             compose, exp_map, geodesic_distance, haar_grid, identity, inverse,
                             log_map, norm, random_points)
from .unitary_dual import Irrep, IrrepLabel, enumerate_dual, weyl_closed_form, weyl_sum
from .fourier import FourierCoefficients, GridFunction, forward, inverse_on_grid, spectral_l2_norm
from .symbol_calculus import (Symbol, bessel_symbol, critical_test_symbol, difference_apply,
                              dyadic_piece, multiplier_symbol, power_symbol, seminorm_estimate,
                              su2_difference_family, subelliptic_symbols, torus_difference_family)
from .quantization import (hormander_integral, kernel_eval, kernel_slice, l2_operator_norm,
                           operator_norm_estimate, quantize_apply, quantize_coefficients)
from .function_spaces import (bmo_seminorm, cz_decompose, lp_norm, make_atom, maximal_function,
                              weak_l1_quasinorm)
from .verification import CheckReport, run_check, solve_subelliptic

__version__ = "0.1.0"
