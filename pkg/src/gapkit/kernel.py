"""Confluent hypergeometric kernel and its sine/Bessel specialisations.

The kernel is

    K(u, v) = (P / pi) * Im(A(u) conj(A(v))) / (u - v)

with ``P = Gamma(1+a+ib) Gamma(1+a-ib) / Gamma(1+2a)^2`` and
``A(x) = chi(x)^(1/2) |2x|^a exp(-ix) M(1+a+ib, 1+2a, 2ix)``. The factor
``|2x|^a`` is split off so that callers can pair the smooth remainder with
Jacobi-weighted quadrature; ``reduced_kernel`` returns that remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .specfun import (bessel_j0, bessel_j0_prime, gamma_pair_modulus, kummer_m,
                      kummer_m_derivative, log_gamma)

# Relative distance below which the diagonal (derivative) formula is used.
DIAGONAL_SWITCH = 1e-6


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleParams:
    """Root exponent ``alpha`` > -1/2 and jump parameter ``b`` (beta = i b)."""

    alpha: float
    b: float = 0.0

    def __post_init__(self):
        a, b = float(self.alpha), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise KernelError(f"parameters must be finite, got alpha={a}, b={b}")
        if not a > -0.5:
            raise KernelError(f"alpha must exceed -1/2, got {a}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "b", b)

    @property
    def beta(self) -> complex:
        return 1j * self.b

    @cached_property
    def log_prefactor(self) -> float:
        """ln of Gamma(1+a+ib) Gamma(1+a-ib) / Gamma(1+2a)^2 (a real number)."""
        return gamma_pair_modulus(self.alpha, self.b) - 2.0 * float(np.real(log_gamma(1.0 + 2.0 * self.alpha)))

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)

    @property
    def kappa(self) -> float:
        """alpha^2 - beta^2 + 1/4, which is alpha^2 + b^2 + 1/4 on this family."""
        return self.alpha ** 2 + self.b ** 2 + 0.25

    def is_sine(self) -> bool:
        return self.alpha == 0.0 and self.b == 0.0

    def is_bessel(self) -> bool:
        return self.alpha == 0.5 and self.b == 0.0


def _check_nonzero(x, name):
    if x == 0:
        raise KernelError(f"{name}=0 lies on the singular axis of |2x|^alpha")


def _chi_half(x, b):
    return math.exp(0.5 * math.pi * b) if x > 0 else math.exp(-0.5 * math.pi * b)


def reduced_a(x: float, p: EnsembleParams) -> complex:
    """A(x) without the |2x|^alpha factor."""
    x = float(x)
    _check_nonzero(x, "x")
    a = 1.0 + p.alpha + 1j * p.b
    return _chi_half(x, p.b) * np.exp(-1j * x) * kummer_m(a, 1.0 + 2.0 * p.alpha, 2j * x)


def reduced_a_prime(x: float, p: EnsembleParams) -> complex:
    """Derivative of ``reduced_a`` (valid away from 0, on either side)."""
    x = float(x)
    _check_nonzero(x, "x")
    a = 1.0 + p.alpha + 1j * p.b
    c = 1.0 + 2.0 * p.alpha
    m = kummer_m(a, c, 2j * x)
    dm = kummer_m_derivative(a, c, 2j * x)
    return _chi_half(x, p.b) * np.exp(-1j * x) * (-1j * m + 2j * dm)


def chf_a(x: float, p: EnsembleParams) -> complex:
    """A(x) = chi^(1/2) |2x|^alpha e^{-ix} M(1+alpha+ib, 1+2alpha, 2ix)."""
    return abs(2.0 * x) ** p.alpha * reduced_a(x, p)


def _is_near(u, v):
    return (u > 0) == (v > 0) and abs(u - v) < DIAGONAL_SWITCH * max(1.0, abs(u))


def reduced_kernel_complex(u: float, v: float, p: EnsembleParams) -> complex:
    """(P/2 pi i)(A B' - A' B)/(u - v) without |2u|^a|2v|^a; real up to rounding."""
    _check_nonzero(u, "u")
    _check_nonzero(v, "v")
    pref = p.prefactor / (2j * math.pi)
    if _is_near(u, v):
        m = 0.5 * (u + v)
        a, da = reduced_a(m, p), reduced_a_prime(m, p)
        return pref * (da * np.conj(a) - a * np.conj(da))
    au, av = reduced_a(u, p), reduced_a(v, p)
    return pref * (au * np.conj(av) - av * np.conj(au)) / (u - v)


def reduced_kernel(u: float, v: float, p: EnsembleParams) -> float:
    return float(reduced_kernel_complex(u, v, p).real)


def chf_kernel_complex(u: float, v: float, p: EnsembleParams) -> complex:
    """Raw complex kernel value (the imaginary part is rounding noise)."""
    scale = abs(2.0 * u) ** p.alpha * abs(2.0 * v) ** p.alpha
    return scale * reduced_kernel_complex(u, v, p)


def chf_kernel(u: float, v: float, p: EnsembleParams) -> float:
    """K^{(alpha, ib)}(u, v) for nonzero real u, v."""
    return float(chf_kernel_complex(u, v, p).real)


def reduced_kernel_matrix(x: np.ndarray, p: EnsembleParams) -> np.ndarray:
    """R(x_i, x_j) for a node set; A is evaluated once per node."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise KernelError("node set contains 0")
    a = np.array([reduced_a(xi, p) for xi in x])
    pref = p.prefactor / math.pi
    num = np.imag(a[:, None] * np.conj(a)[None, :])
    diff = x[:, None] - x[None, :]
    near = (np.sign(x)[:, None] == np.sign(x)[None, :]) & (
        np.abs(diff) < DIAGONAL_SWITCH * np.maximum(1.0, np.abs(x))[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        r = pref * num / diff
    if np.any(near):
        for i, j in zip(*np.nonzero(near)):
            r[i, j] = reduced_kernel(x[i], x[j], p)
    # Exact symmetry: the two triangles come from the same products.
    return 0.5 * (r + r.T)


def sine_kernel(u: float, v: float) -> float:
    d = u - v
    if abs(d) < 1e-6:
        return (1.0 - d * d / 6.0) / math.pi
    return math.sin(d) / (math.pi * d)


def bessel_kernel(u: float, v: float) -> float:
    """(sqrt|uv|/2)(J0(u)J0'(v) - J0(v)J0'(u))/(u - v); alpha=1/2, b=0 case."""
    pre = 0.5 * math.sqrt(abs(u * v))
    d = u - v
    if abs(d) < DIAGONAL_SWITCH * max(1.0, abs(u)):
        # Limit via Bessel's equation: J0'' = -J0'/x - J0.
        m = 0.5 * (u + v)
        j, dj = float(bessel_j0(m)), float(bessel_j0_prime(m))
        ddj = -dj / m - j
        return pre * (dj * dj - j * ddj)
    return pre * (float(bessel_j0(u)) * float(bessel_j0_prime(v))
                  - float(bessel_j0(v)) * float(bessel_j0_prime(u))) / d


__all__ = [
    "EnsembleParams", "KernelError", "chf_a", "chf_kernel", "chf_kernel_complex",
    "reduced_a", "reduced_a_prime", "reduced_kernel", "reduced_kernel_complex",
    "reduced_kernel_matrix", "sine_kernel", "bessel_kernel", "DIAGONAL_SWITCH",
]
