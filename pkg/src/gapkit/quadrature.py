"""Gauss-Legendre and one-sided Gauss-Jacobi rules.

Rules are produced from the three-term recurrence of the orthogonal family:
Golub-Welsch supplies starting nodes, a few Newton sweeps on the orthonormal
recurrence polish them, and weights come from the Christoffel function
``1 / sum_k p_k(x)^2``, which keeps small weights accurate to full relative
precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

MAX_NODES = 4096


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights on ``interval``.

    When ``jacobi_exponent`` is set the weights integrate against
    ``(x - lo)**jacobi_exponent dx``; otherwise against ``dx``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    interval: Tuple[float, float]
    jacobi_exponent: Optional[float] = None

    def __post_init__(self):
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    def __len__(self):
        return self.nodes.size

    def moment(self) -> float:
        """Exact mass of the rule's measure on its interval."""
        lo, hi = self.interval
        g = self.jacobi_exponent
        if g is None:
            return hi - lo
        return (hi - lo) ** (g + 1.0) / (g + 1.0)

    def integrate(self, f) -> complex:
        return np.dot(self.weights, f(self.nodes))


def _recurrence(n: int, g: float):
    """Monic recurrence coefficients for x**g on (0, 1)."""
    # Jacobi (a, b) = (0, g) on (-1, 1), then mapped by y = (1 + x) / 2.
    a, b = 0.0, g
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        diag[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        if n > 2:
            kk = k[2:]
            off[1:] = (4 * kk * (kk + a) * (kk + b) * (kk + ab)
                       / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1)))
    return (1.0 + diag) / 2.0, off / 4.0


def _orthonormal_eval(x, alpha_c, beta_c, mu0, n):
    """p_n, p_n' and sum_{k<n} p_k^2 of the orthonormal family at x.

    ``beta_c[j]`` holds beta_{j+1}; it must have at least n entries.
    """
    sq = np.sqrt(beta_c)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / np.sqrt(mu0))
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    christ = p * p
    for k in range(n):
        back = sq[k - 1] if k > 0 else 0.0
        p_next = ((x - alpha_c[k]) * p - back * p_prev) / sq[k]
        dp_next = (p + (x - alpha_c[k]) * dp - back * dp_prev) / sq[k]
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        if k < n - 1:
            christ = christ + p * p
    return p, dp, christ


@lru_cache(maxsize=256)
def _jacobi_unit(n: int, g: float) -> Tuple[np.ndarray, np.ndarray]:
    alpha_c, beta_c = _recurrence(n + 1, g)
    mu0 = 1.0 / (g + 1.0)
    if n == 1:
        x0 = alpha_c[:1].copy()
    else:
        x0 = eigh_tridiagonal(alpha_c[:n], np.sqrt(beta_c[: n - 1]), eigvals_only=True)
    x = x0
    for _ in range(100):
        p, dp, _ = _orthonormal_eval(x, alpha_c, beta_c, mu0, n)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 4e-16:
            break
    else:
        # Newton stalled; keep the eigenvalue nodes.
        x = x0
    x = np.sort(x)
    _, _, christ = _orthonormal_eval(x, alpha_c, beta_c, mu0, n)
    w = 1.0 / christ
    # Renormalise against the exact moment to remove accumulated drift.
    w *= mu0 / w.sum()
    return x, w


def _check_n(n: int, cap: int):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise QuadratureError(f"number of nodes must be a positive integer, got {n!r}")
    if n > cap:
        raise QuadratureError(f"{n} nodes exceeds the configured cap of {cap}")


def gauss_legendre(n: int, cap: int = MAX_NODES) -> QuadratureRule:
    """n-point Gauss-Legendre rule on (-1, 1)."""
    _check_n(n, cap)
    x, w = _jacobi_unit(int(n), 0.0)
    nodes = 2.0 * x - 1.0
    # Enforce exact symmetry about the origin.
    nodes = 0.5 * (nodes - nodes[::-1])
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(nodes, 2.0 * w, (-1.0, 1.0))


def gauss_jacobi_left(n: int, exponent: float, cap: int = MAX_NODES) -> QuadratureRule:
    """n-point Gauss rule on (0, 1) for the measure ``x**exponent dx``."""
    _check_n(n, cap)
    if not exponent > -1.0:
        raise QuadratureError(f"x**{exponent} is not integrable at 0; need exponent > -1")
    x, w = _jacobi_unit(int(n), float(exponent))
    return QuadratureRule(x.copy(), w.copy(), (0.0, 1.0), float(exponent))


def map_rule(rule: QuadratureRule, lo: float, hi: float) -> QuadratureRule:
    """Affine image of ``rule`` on (lo, hi)."""
    if not lo < hi:
        raise QuadratureError(f"need lo < hi, got ({lo}, {hi})")
    a, b = rule.interval
    if (a, b) == (lo, hi):
        return rule
    scale = (hi - lo) / (b - a)
    nodes = lo + (rule.nodes - a) * scale
    power = 1.0 if rule.jacobi_exponent is None else rule.jacobi_exponent + 1.0
    weights = rule.weights * scale ** power
    return QuadratureRule(nodes, weights, (float(lo), float(hi)), rule.jacobi_exponent)


def jacobi_moment(exponent: float, lo: float = 0.0, hi: float = 1.0) -> float:
    return float(np.exp((exponent + 1.0) * np.log(hi - lo) - np.log1p(exponent)))


def composite_legendre(breaks, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Panelled Gauss-Legendre nodes/weights over consecutive ``breaks``."""
    ref = gauss_legendre(q)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * ref.nodes[None, :]
    w = half * ref.weights[None, :]
    return x.ravel(), w.ravel()


__all__ = [
    "QuadratureRule", "QuadratureError", "gauss_legendre", "gauss_jacobi_left",
    "map_rule", "composite_legendre", "jacobi_moment", "MAX_NODES",
]
