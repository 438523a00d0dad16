"""Closed-form asymptotic laws on the real ray.

On the ray s = -i t the Hamiltonian laws become

    h(t) ~ -C0 t^{2a}                              (t -> 0)
    h(t) ~ -t/16 + a/2 - kappa / t                 (t -> infinity)

with kappa = a^2 + b^2 + 1/4, and the regularised total integral reads

    int_0^c h + int_c^inf [h + t/16 - a/2 + kappa/t] dt
        = -c^2/32 + a c/2 - kappa ln(c/4) + ln K(a, b),

where K is the Barnes-G constant of ``log_barnes_constant``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .kernel import EnsembleParams
from .painleve import head_coefficient, integrate_trace
from .quadrature import gauss_legendre, map_rule
from .specfun import dyson_constant, log_barnes_g

# Tail-fit ensemble: end points (relative offsets), window starts and
# rational degrees; the median over the ensemble is used.
TAIL_T_MAX = 36.0
TAIL_END_OFFSETS = (-4.0, 0.0)
TAIL_WINDOWS = (0.65, 0.7, 0.75)
TAIL_DEGREES = (2, 3, 4)
TAIL_SAMPLES = 300


@dataclass(frozen=True)
class AsymptoticPrediction:
    x: float
    value: float
    order: str


def log_barnes_constant(p: EnsembleParams) -> float:
    """ln[sqrt(pi) G(1/2)^2 G(1+2a) / (2^{2a^2} |G(1+a+ib)|^2)]."""
    a, b = p.alpha, p.b
    g_half = log_barnes_g(0.5).real
    g_2a = log_barnes_g(1.0 + 2.0 * a).real
    g_pair = 2.0 * log_barnes_g(complex(1.0 + a, b)).real
    return float(0.5 * math.log(math.pi) + 2.0 * g_half + g_2a - 2.0 * a * a * math.log(2.0) - g_pair)


def large_gap_log(p: EnsembleParams, s: float) -> float:
    """-s^2/2 + 2 a s - kappa ln s + ln K; no O(1/s) correction."""
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    return float(-0.5 * s * s + 2.0 * p.alpha * s - p.kappa * math.log(s) + log_barnes_constant(p))


def dyson_log(s: float) -> float:
    """-s^2/2 - ln(s)/4 + ln 2/12 + 3 zeta'(-1)."""
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    return float(-0.5 * s * s - 0.25 * math.log(s) + dyson_constant())


def h_small_t(p: EnsembleParams, t: float) -> float:
    return -head_coefficient(p) * t ** (2.0 * p.alpha)


def h_large_t(p: EnsembleParams, t: float) -> float:
    return -t / 16.0 + p.alpha / 2.0 - p.kappa / t


def regularised_h(p: EnsembleParams, t, h):
    t = np.asarray(t, dtype=float)
    return np.asarray(h) + t / 16.0 - p.alpha / 2.0 + p.kappa / t


@dataclass(frozen=True)
class TotalIntegralCheck:
    t_c: float
    lhs: float
    rhs: float
    remainder: float
    t_end: float
    remainder_spread: float = 0.0

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)


def rational_tail(t: np.ndarray, g: np.ndarray, t_end: float, degree: int) -> float:
    """int_{t_end}^inf g from a (degree, degree) rational fit of g t^2 in w = 1/t.

    The fit is the linearised least-squares problem y Q(w) = P(w) with
    Q(0) = 1; returns nan when Q changes sign on (0, 1/t_end].
    """
    w = 1.0 / t
    y = g * t * t
    cols = [w ** j for j in range(degree + 1)] + [-y * w ** j for j in range(1, degree + 1)]
    a = np.stack(cols, axis=1)
    scale = np.max(np.abs(a), axis=0)
    c, *_ = np.linalg.lstsq(a / scale, y, rcond=None)
    c = c / scale
    p_coef = c[: degree + 1]
    q_coef = np.concatenate([[1.0], c[degree + 1:]])
    rule = map_rule(gauss_legendre(40), 0.0, 1.0 / t_end)
    pv = np.polyval(p_coef[::-1], rule.nodes)
    qv = np.polyval(q_coef[::-1], rule.nodes)
    if np.any(qv <= 0):
        return float("nan")
    return float(np.dot(rule.weights, pv / qv))


def fit_tail(p: EnsembleParams, trace, t_end: float) -> Tuple[float, float, float]:
    """Extrapolated int_{t_end}^inf [h + t/16 - a/2 + kappa/t] dt.

    The regularised integrand behaves like a divergent series in 1/t plus
    terms of size e^{-t/2}, so windows start well away from the origin and
    rational rather than polynomial fits are used. A small ensemble of fits
    (end point, window, degree) is formed; the result is anchored at the
    latest end point. Returns (anchor end, remainder, spread).
    """
    body = {}
    estimates = []
    for off in TAIL_END_OFFSETS:
        te = t_end + off
        for lo in TAIL_WINDOWS:
            t = np.linspace(lo * te, te, TAIL_SAMPLES)
            g = regularised_h(p, t, trace.h_at(t).real)
            for deg in TAIL_DEGREES:
                rem = rational_tail(t, g, te, deg)
                if not math.isfinite(rem):
                    continue
                # shift every estimate to a common anchor at t_end
                if te not in body:
                    body[te] = _regularised_integral(p, trace, te, t_end)
                estimates.append(rem - body[te])
    if not estimates:
        raise ValueError("no admissible tail fit; extend the trace")
    est = np.array(estimates)
    return t_end, float(np.median(est)), float(np.max(est) - np.min(est))


def _regularised_integral(p, trace, lo, hi):
    """int_lo^hi of the regularised integrand from the trace."""
    if lo == hi:
        return 0.0
    a, k = p.alpha, p.kappa
    return (trace.log_det(hi) - trace.log_det(lo) + (hi * hi - lo * lo) / 32.0 - a * (hi - lo) / 2.0
            + k * math.log(hi / lo))


def total_integral_check(p: EnsembleParams, t_c: float = 8.0, trace=None, tol: float = 1e-12,
                         t_end: Optional[float] = None) -> TotalIntegralCheck:
    """Both sides of the regularised total-integral identity at c = -i t_c.

    The trace (integrated to ``t_end``, default 36) supplies the integral up
    to its end; the rest is extrapolated by ``fit_tail``. Traces are only
    used up to the point where |Im h| first exceeds 1e-8 (1 + |h|). If the
    usable part ends before 3 t_c the remainder is reported as ``inf``.
    """
    if not t_c > 0:
        raise ValueError(f"t_c must be positive, got {t_c}")
    if trace is None:
        trace = integrate_trace(p, 0.05, t_end or TAIL_T_MAX, tol)
    end = min(t_end or trace.t_max, trace.reliable_until())
    a, k = p.alpha, p.kappa
    rhs = -t_c * t_c / 32.0 + a * t_c / 2.0 - k * math.log(t_c / 4.0) + log_barnes_constant(p)
    if end < 3 * t_c:
        return TotalIntegralCheck(t_c, float("nan"), rhs, float("inf"), end, float("inf"))
    _, rem, spread = fit_tail(p, trace, end)
    lhs = trace.log_det(t_c) + _regularised_integral(p, trace, t_c, end) + rem
    return TotalIntegralCheck(t_c, lhs, rhs, rem, end, spread)


__all__ = [
    "AsymptoticPrediction", "TotalIntegralCheck", "log_barnes_constant", "large_gap_log",
    "dyson_log", "h_small_t", "h_large_t", "regularised_h", "rational_tail", "fit_tail",
    "total_integral_check",
]
