"""Operator-factorised solutions for linear potentials, Airy packets and Airy transforms."""

from .errors import ConvergenceError, DomainError, StepSizeError, WidenDomainError
from .grid import Grid, GridFunction, apodization_window, apodize, translate
from .polynomials import PolyDense, airy_polynomial, hermite_higher, verify_recurrences
from .special_fn import (AiryScale, QuadratureConfig, airy_ai, airy_complex_closed_form, airy_ode_residual,
                         airy_two_var, airy_two_var_closed, fit_airy_ode)
from .transforms import (airy_transform, airy_transformed_solution, cubic_evolution, gauss_weierstrass,
                         weyl_conjugation_check)
from .evolution import (LinearPotentialParams, centroid_trajectory, phase_phi, solve_heat_linear,
                        solve_schrodinger_airy, solve_schrodinger_linear)
from .wei_norman import CoeffFunctions, factorized_evolution, wei_norman_coeffs

__version__ = "0.1.0"
