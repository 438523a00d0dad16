"""Gap probabilities of the confluent hypergeometric kernel by independent routes."""

from .asympt import dyson_log, large_gap_log, total_integral_check
from .fredholm import ConvergenceError, GapEstimate, gap_log_det
from .kernel import EnsembleParams, chf_kernel
from .painleve import HamiltonianTrace, PainleveState, integrate_trace, log_det_via_hamiltonian
from .quadrature import QuadratureRule, gauss_jacobi_left, gauss_legendre
from .toeplitz import ToeplitzSymbol, fourier_coeffs, gap_ratio, toeplitz_det

__version__ = "0.1.0"

__all__ = [
    "EnsembleParams", "GapEstimate", "ConvergenceError", "QuadratureRule", "PainleveState",
    "HamiltonianTrace", "ToeplitzSymbol", "gauss_legendre", "gauss_jacobi_left", "chf_kernel",
    "gap_log_det", "integrate_trace", "log_det_via_hamiltonian", "fourier_coeffs", "toeplitz_det",
    "gap_ratio", "large_gap_log", "dyson_log", "total_integral_check",
]
