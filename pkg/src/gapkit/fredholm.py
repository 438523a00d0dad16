"""Nystrom discretisation of det(I - K) on L^2(-s, s)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor

from .kernel import EnsembleParams, reduced_kernel_matrix
from .quadrature import gauss_jacobi_left, map_rule

METHODS = ("fredholm", "painleve", "toeplitz", "closed_form", "asymptotic")
N_MAX = 512


class ConvergenceError(RuntimeError):
    """A route could not reach its requested accuracy."""


@dataclass(frozen=True)
class GapEstimate:
    s: float
    log_det: float
    method: str
    err_est: float = 0.0
    nodes: Optional[int] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.err_est < 0 or math.isnan(self.err_est):
            raise ValueError(f"err_est must be >= 0, got {self.err_est}")

    @property
    def det(self) -> float:
        return math.exp(self.log_det)


def split_rule(s: float, n: int, alpha: float):
    """Nodes/weights on (-s, s) for the measure |x|^{2 alpha} dx, n per half."""
    half = map_rule(gauss_jacobi_left(n, 2.0 * alpha), 0.0, s)
    x = np.concatenate([-half.nodes[::-1], half.nodes])
    w = np.concatenate([half.weights[::-1], half.weights])
    return x, w


def nystrom_matrix(p: EnsembleParams, s: float, n: int) -> np.ndarray:
    """Symmetric 2n x 2n matrix sqrt(w_i w_j) 2^{2a} R(x_i, x_j)."""
    x, w = split_rule(s, n, p.alpha)
    r = reduced_kernel_matrix(x, p)
    sw = np.sqrt(w) * 2.0 ** p.alpha
    return (sw[:, None] * sw[None, :]) * r


def log_det_identity_minus(m: np.ndarray) -> float:
    """ln det(I - M) by pivoted LU; raises if the determinant is not positive."""
    a = np.eye(m.shape[0]) - m
    lu, piv = lu_factor(a, check_finite=True)
    diag = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(piv.size)))
    sign = (-1) ** swaps * np.prod(np.sign(diag))
    if sign <= 0 or np.any(diag == 0):
        raise ConvergenceError("discretised determinant is not positive; refine the rule")
    return float(np.sum(np.log(np.abs(diag))))


def _log_det_at(p, s, n):
    return log_det_identity_minus(nystrom_matrix(p, s, n))


def gap_log_det(p: EnsembleParams, s: float, n: int = 32, tol: Optional[float] = None,
                n_max: int = N_MAX) -> GapEstimate:
    """ln det(I - K_s) with err_est = |ld(n) - ld(n/2)|.

    With ``tol`` set, n is doubled until err_est <= tol; exceeding ``n_max``
    raises ``ConvergenceError`` instead of returning an unconverged value.
    """
    s = float(s)
    if not s >= 0 or not math.isfinite(s):
        raise ValueError(f"s must be a finite non-negative number, got {s}")
    if n < 4:
        raise ValueError(f"need at least 4 nodes per half-interval, got {n}")
    if s == 0.0:
        return GapEstimate(0.0, 0.0, "fredholm", 0.0, n)
    coarse = _log_det_at(p, s, n // 2)
    while True:
        fine = _log_det_at(p, s, n)
        err = abs(fine - coarse)
        if tol is None or err <= tol:
            return GapEstimate(s, fine, "fredholm", err, n)
        if 2 * n > n_max:
            raise ConvergenceError(
                f"Nystrom estimate at s={s} not converged: err_est {err:.3g} > {tol:.3g} with n={n}")
        coarse, n = fine, 2 * n


def trace_estimate(p: EnsembleParams, s: float, n: int = 32) -> float:
    """int_{-s}^{s} K(x, x) dx with the same Jacobi-weighted rule."""
    if s == 0:
        return 0.0
    x, w = split_rule(float(s), n, p.alpha)
    r = reduced_kernel_matrix(x, p)
    return float(np.dot(w, np.diag(r)) * 2.0 ** (2.0 * p.alpha))


__all__ = ["GapEstimate", "ConvergenceError", "gap_log_det", "trace_estimate",
           "nystrom_matrix", "split_rule", "log_det_identity_minus", "METHODS", "N_MAX"]
