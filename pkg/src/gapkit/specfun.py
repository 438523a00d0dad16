"""Complex special functions: log-Gamma, Kummer M, Bessel J0/I0, Barnes G."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from .quadrature import gauss_jacobi_left

KUMMER_Z_BOUND = 60.0
KUMMER_MAX_TERMS = 10_000
BESSEL_SERIES_BOUND = 40.0

LOG_2PI = math.log(2.0 * math.pi)

# B_2k / (2k (2k - 1)) for the Stirling series.
_BERNOULLI_2K = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
                 Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
                 Fraction(43867, 798), Fraction(-174611, 330)]
_STIRLING = [float(b / ((2 * k) * (2 * k - 1))) for k, b in enumerate(_BERNOULLI_2K, start=1)]
_STIRLING_SHIFT = 16.0


class SpecialFunctionError(ValueError):
    pass


def _finite(z, name="argument"):
    if not np.all(np.isfinite(z)):
        raise SpecialFunctionError(f"non-finite {name}: {z!r}")


def log_gamma(z):
    """Log-Gamma on the plane cut along the non-positive real axis.

    Stirling series after shifting ``Re z`` above 16 with the recurrence
    ``lnG(z) = lnG(z + m) - sum_k ln(z + k)``; the branch agrees with the
    analytic continuation from the positive axis (``scipy.special.loggamma``).
    Accepts scalars or arrays.
    """
    z = np.asarray(z, dtype=complex)
    _finite(z)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise SpecialFunctionError("log_gamma has poles at non-positive integers")
    shift = int(max(0, math.ceil(_STIRLING_SHIFT - float(np.min(z.real)))))
    acc = np.zeros_like(z)
    w = z.copy()
    for _ in range(shift):
        acc += np.log(w)
        w += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    out = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series * inv - acc
    return out[()] if out.ndim == 0 else out


def gamma_pair_modulus(alpha: float, b: float) -> float:
    """ln[Gamma(1+alpha+ib) Gamma(1+alpha-ib)] = 2 Re lnGamma(1+alpha+ib)."""
    return 2.0 * float(np.real(log_gamma(1.0 + alpha + 1j * b)))


def _kummer_terms_float(a, b, z, tol):
    term = 1.0 + 0j
    total = 1.0 + 0j
    biggest = 1.0
    quiet = 0
    for k in range(KUMMER_MAX_TERMS):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        mag = abs(term)
        biggest = max(biggest, mag)
        if mag <= tol * abs(total):
            quiet += 1
            if quiet == 3:
                return total, biggest
        else:
            quiet = 0
    raise SpecialFunctionError(f"Kummer series did not converge in {KUMMER_MAX_TERMS} terms (|z|={abs(z):.3g})")


def _kummer_terms_mp(a, b, z, dps):
    with mpmath.workdps(dps):
        a, b, z = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z)
        eps = mpmath.mpf(10) ** (-dps + 2)
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        quiet = 0
        for k in range(KUMMER_MAX_TERMS):
            term = term * (a + k) / (b + k) * z / (k + 1)
            total += term
            if abs(term) <= eps * abs(total):
                quiet += 1
                if quiet == 3:
                    return complex(total)
            else:
                quiet = 0
    raise SpecialFunctionError(f"Kummer series did not converge in {KUMMER_MAX_TERMS} terms")


def kummer_m(a, b, z, bound: float = KUMMER_Z_BOUND) -> complex:
    """Kummer's series 1 + sum (a)_k/(b)_k z^k/k!.

    The series is summed in double precision; if the largest term exceeds
    the result by more than 100x (cancellation, typical on the imaginary
    axis) it is re-summed with enough extra decimal digits to absorb the loss.
    """
    a, b, z = complex(a), complex(b), complex(z)
    _finite(np.array([a, b, z]))
    if b.imag == 0 and b.real <= 0 and b.real == round(b.real):
        raise SpecialFunctionError(f"b={b} is a non-positive integer")
    if abs(z) > bound:
        raise SpecialFunctionError(f"|z|={abs(z):.4g} exceeds series-safe bound {bound}")
    if z == 0:
        return 1.0 + 0j
    total, biggest = _kummer_terms_float(a, b, z, 1e-16)
    loss = biggest / max(abs(total), 1e-300)
    if loss > 1e2:
        total = _kummer_terms_mp(a, b, z, 20 + int(math.ceil(math.log10(loss))))
    return total


def kummer_m_derivative(a, b, z, bound: float = KUMMER_Z_BOUND) -> complex:
    """d/dz M(a, b, z) = (a/b) M(a+1, b+1, z)."""
    a, b = complex(a), complex(b)
    if b == 0:
        raise SpecialFunctionError("b = 0")
    return a / b * kummer_m(a + 1, b + 1, z, bound)


# --- Bessel functions of order zero -------------------------------------------


def _series_i(x, order):
    """Power series of I_0 / I_1 (all terms positive)."""
    q = 0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, 400):
        term = term * q / (k * (k + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _series_j(x, order):
    q = -0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (k + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel_pq(x, order):
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    k = 1
    while k < 60:
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 1:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 == 1 else term
        if np.all(np.abs(term) < 1e-17):
            break
        k += 1
    return p, q


def _asym_j(x, order):
    p, q = _hankel_pq(x, order)
    chi = x - (0.5 * order + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _miller_j01(x):
    """J0, J1 by backward recurrence normalised with 1 = J0 + 2 sum J_2k."""
    start = int(2 * ((int(1.5 * np.max(x)) + 40) // 2))
    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j0 = j1 = None
    for k in range(start, 0, -1):
        jm1 = 2.0 * k / x * j - jp1
        jp1, j = j, jm1
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        if k - 1 == 1:
            j1 = j.copy()
        big = np.abs(j) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j, jp1, norm = j * scale, jp1 * scale, norm * scale
            if j1 is not None:
                j1 = j1 * scale
    j0 = j
    norm += j0
    return j0 / norm, j1 / norm


def _bessel_j(x, order):
    x = np.asarray(x, dtype=float)
    _finite(x)
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax <= 8.0
    mid = (ax > 8.0) & (ax <= BESSEL_SERIES_BOUND)
    big = ax > BESSEL_SERIES_BOUND
    if np.any(small):
        out[small] = _series_j(ax[small], order)
    if np.any(mid):
        out[mid] = _miller_j01(ax[mid])[order]
    if np.any(big):
        out[big] = _asym_j(ax[big], order)
    if order == 1:
        out = np.where(x < 0, -out, out)
    return out[()] if out.ndim == 0 else out


def _bessel_i_scaled(x, order):
    """exp(-|x|) I_order(|x|) for |x| (sign restored by caller)."""
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(ax)
    small = ax <= BESSEL_SERIES_BOUND
    if np.any(small):
        out[small] = _series_i(ax[small], order) * np.exp(-ax[small])
    big = ~small
    if np.any(big):
        xb = ax[big]
        mu = 4.0 * order * order
        term = np.ones_like(xb)
        total = np.ones_like(xb)
        for k in range(1, 60):
            term = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * xb)
            total += term
            if np.all(np.abs(term) < 1e-17):
                break
        out[big] = total / np.sqrt(2.0 * math.pi * xb)
    return out


def bessel_j0(x):
    return _bessel_j(x, 0)


def bessel_j0_prime(x):
    """J0'(x) = -J1(x)."""
    return -_bessel_j(x, 1)


def bessel_i0(x):
    x = np.asarray(x, dtype=float)
    _finite(x)
    out = _bessel_i_scaled(x, 0) * np.exp(np.abs(x))
    return out[()] if out.ndim == 0 else out


def bessel_i0_prime(x):
    """I0'(x) = I1(x)."""
    x = np.asarray(x, dtype=float)
    _finite(x)
    out = _bessel_i_scaled(x, 1) * np.exp(np.abs(x)) * np.sign(x)
    return out[()] if out.ndim == 0 else out


def log_bessel_i0(x):
    x = np.asarray(x, dtype=float)
    _finite(x)
    out = np.log(_bessel_i_scaled(x, 0)) + np.abs(x)
    return out[()] if out.ndim == 0 else out


def bessel_i0_ratio(x):
    """I0'(x) / I0(x), overflow-free."""
    x = np.asarray(x, dtype=float)
    _finite(x)
    out = _bessel_i_scaled(x, 1) / _bessel_i_scaled(x, 0) * np.sign(x)
    return out[()] if out.ndim == 0 else out


# --- Barnes G ---------------------------------------------------------------


def _integral_log_gamma(w: complex, tol: float) -> complex:
    """int_0^w lnGamma(1+t) dt along the straight segment."""
    if w == 0:
        return 0j
    prev = None
    n = 16
    while n <= 1024:
        rule = gauss_jacobi_left(n, 0.0)
        val = w * np.dot(rule.weights, log_gamma(1.0 + w * rule.nodes))
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
        n *= 2
    raise SpecialFunctionError(f"Barnes integral did not settle for w={w}")


def log_barnes_g(z, tol: float = 1e-13) -> complex:
    """ln G(z) for Re z > 0 from the log-Gamma integral representation.

    ln G(1+w) = (w/2) ln 2pi - w(w+1)/2 + w lnGamma(1+w) - int_0^w lnGamma(1+t) dt
    """
    z = complex(z)
    _finite(np.array([z]))
    if not z.real > 0:
        raise SpecialFunctionError(f"log_barnes_g needs Re z > 0, got {z}")
    w = z - 1.0
    if w == 0:
        return 0j
    return (0.5 * w * LOG_2PI - 0.5 * w * (w + 1.0) + w * complex(log_gamma(1.0 + w))
            - _integral_log_gamma(w, tol))


def barnes_recurrence_defect(z) -> complex:
    """ln G(z+1) - lnGamma(z) - ln G(z); zero up to quadrature error."""
    return log_barnes_g(z + 1) - complex(log_gamma(z)) - log_barnes_g(z)


def zeta_prime_minus1() -> float:
    """zeta'(-1) from ln G(1/2) = (3/2) zeta'(-1) - (1/4) ln pi + (1/24) ln 2."""
    lg = log_barnes_g(0.5).real
    return (2.0 / 3.0) * (lg + 0.25 * math.log(math.pi) - math.log(2.0) / 24.0)


def dyson_constant() -> float:
    """ln 2 / 12 + 3 zeta'(-1)."""
    return math.log(2.0) / 12.0 + 3.0 * zeta_prime_minus1()
