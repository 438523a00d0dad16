"""Toeplitz determinants of the arc weight and the finite-n gap ratio.

The weight on the arc t <= theta <= 2 pi - t is

    w(theta) = (2 sin(theta/2))^{2a} exp(-b (theta - pi)),

with Fourier coefficients c_k = (1/2pi) int w(theta) e^{-ik theta} d theta.
D_n(t) = det(c_{j-k}) and D_n(2s/n) / D_n(0) approaches det(I - K_s).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import lu_factor

from .fredholm import ConvergenceError, GapEstimate
from .kernel import EnsembleParams
from .quadrature import composite_legendre, gauss_jacobi_left, map_rule

N_CAP = 2000
PANEL_NODES = 20
NODES_PER_PERIOD = 10
DOUBLING_TOL = 1e-11
IMAG_LOGDET_TOL = 1e-9
_K_BLOCK = 256


class ToeplitzError(ArithmeticError):
    """Loss of positivity or an unconverged coefficient quadrature."""


@dataclass(frozen=True)
class ToeplitzSymbol:
    """Coefficients c_k for k = -k_max..k_max (index k_max holds c_0)."""

    params: EnsembleParams
    t: float
    coeffs: np.ndarray
    quad_error: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficients must be a 1-d array of odd length")
        m = c.size // 2
        c0 = c[m]
        if abs(c0.imag) > 1e-13 or not c0.real > 0:
            raise ValueError(f"c_0 must be real and positive, got {c0}")
        if np.max(np.abs(c[::-1] - np.conj(c)), initial=0.0) > 1e-13 * max(1.0, abs(c0)):
            raise ValueError("coefficients violate c_{-k} = conj(c_k)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def k_max(self) -> int:
        return self.coeffs.size // 2

    def c(self, k: int) -> complex:
        if abs(k) > self.k_max:
            raise IndexError(f"|k| = {abs(k)} exceeds k_max = {self.k_max}")
        return complex(self.coeffs[self.k_max + k])

    def column(self, n: int) -> np.ndarray:
        """c_0, c_1, ..., c_{n-1}: the first column of the n x n matrix."""
        if n - 1 > self.k_max:
            raise ValueError(f"need coefficients up to |k| = {n - 1}, have {self.k_max}")
        return self.coeffs[self.k_max:self.k_max + n].copy()

    def matrix(self, n: int) -> np.ndarray:
        """T_{jk} = c_{j-k}, j, k = 0..n-1."""
        col = self.column(n)
        idx = np.arange(n)[:, None] - np.arange(n)[None, :]
        return np.where(idx >= 0, col[np.abs(idx)], np.conj(col[np.abs(idx)]))


def _check_t(t):
    t = float(t)
    if not (0.0 <= t < math.pi):
        raise ValueError(f"t must lie in [0, pi), got {t}")
    return t


def _half_arc_rule(t: float, alpha: float, k_max: int, q: int, refine: int):
    """Nodes/weights on [t, pi] for (2 sin(theta/2))^{2 alpha} d theta.

    Panels of length at most q 2pi / (10 k_max) keep >= 10 nodes per period.
    For t > 0 the root at theta = 0 is resolved by panels doubling in length
    from t; for t = 0 the first panel is Gauss-Jacobi in theta^{2 alpha} with
    the analytic factor (sin(theta/2)/(theta/2))^{2 alpha} left in the weight.
    ``refine`` splits every panel into that many equal pieces.
    """
    span = math.pi - t
    max_len = min(0.5, q * 2.0 * math.pi / (NODES_PER_PERIOD * max(k_max, 1)))
    xs, ws = [], []
    if t == 0.0:
        h = min(max_len, span)
        jac = gauss_jacobi_left(q * refine, 2.0 * alpha)
        r = map_rule(jac, 0.0, h)
        x = r.nodes
        xs.append(x)
        ws.append(r.weights * np.sinc(x / (2.0 * math.pi)) ** (2.0 * alpha))
        lo = h
    else:
        lo = t
        grade = [t]
        if alpha != 0.0:
            while grade[-1] < min(max_len, math.pi):
                grade.append(min(2.0 * grade[-1], math.pi))
        if len(grade) > 1:
            gx, gw = composite_legendre(_refine(grade, refine), q)
            xs.append(gx)
            ws.append(gw * (2.0 * np.sin(0.5 * gx)) ** (2.0 * alpha))
            lo = grade[-1]
    if lo < math.pi:
        npan = max(1, math.ceil((math.pi - lo) / max_len))
        brk = np.linspace(lo, math.pi, npan + 1)
        bx, bw = composite_legendre(_refine(brk, refine), q)
        xs.append(bx)
        ws.append(bw * (2.0 * np.sin(0.5 * bx)) ** (2.0 * alpha))
    return np.concatenate(xs), np.concatenate(ws)


def _refine(breaks, refine):
    breaks = np.asarray(breaks, dtype=float)
    if refine == 1:
        return breaks
    a, b = breaks[:-1, None], breaks[1:, None]
    frac = np.arange(refine)[None, :] / refine
    inner = (a + (b - a) * frac).ravel()
    return np.concatenate([inner, breaks[-1:]])


def _coefficients(p: EnsembleParams, t: float, k_max: int, q: int, refine: int) -> np.ndarray:
    """c_0..c_{k_max} using the reflection theta -> 2 pi - theta of [t, pi]."""
    x, w = _half_arc_rule(t, p.alpha, k_max, q, refine)
    left = w * np.exp(-p.b * (x - math.pi))
    right = w * np.exp(p.b * (x - math.pi))
    out = np.empty(k_max + 1, dtype=complex)
    for k0 in range(0, k_max + 1, _K_BLOCK):
        k = np.arange(k0, min(k0 + _K_BLOCK, k_max + 1))[:, None]
        ph = np.exp(-1j * k * x[None, :])
        out[k0:k0 + k.shape[0]] = ph @ left + np.conj(ph) @ right
    return out / (2.0 * math.pi)


def fourier_coeffs(p: EnsembleParams, t: float, k_max: int, q: int = PANEL_NODES,
                   check: bool = True) -> ToeplitzSymbol:
    """Fourier coefficients of the arc weight for |k| <= k_max.

    With ``check`` the computation is repeated on panels split in two and a
    disagreement above 1e-11 raises ``ConvergenceError``.
    """
    t = _check_t(t)
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    c = _coefficients(p, t, k_max, q, 1)
    err = 0.0
    if check:
        fine = _coefficients(p, t, k_max, q, 2)
        err = float(np.max(np.abs(fine - c)))
        if err > DOUBLING_TOL:
            raise ConvergenceError(f"coefficient quadrature not converged at t={t}: "
                                   f"panel doubling changes c_k by {err:.3g}")
        c = fine
    c[0] = c[0].real
    full = np.concatenate([np.conj(c[:0:-1]), c])
    return ToeplitzSymbol(p, t, full, err)


def toeplitz_log_det(sym: ToeplitzSymbol, n: int) -> float:
    """ln D_n from a pivoted LU factorisation of the Hermitian matrix."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    lu, piv = lu_factor(sym.matrix(n), check_finite=True)
    diag = np.diag(lu)
    if np.any(diag == 0):
        raise ToeplitzError(f"singular Toeplitz matrix at n={n}, t={sym.t}")
    swaps = int(np.sum(piv != np.arange(n)))
    phase = np.sum(np.angle(diag)) + math.pi * swaps
    phase = math.remainder(phase, 2.0 * math.pi)
    if abs(phase) > IMAG_LOGDET_TOL:
        raise ToeplitzError(f"determinant lost positivity at n={n}, t={sym.t} (phase {phase:.3g})")
    return float(np.sum(np.log(np.abs(diag))))


def toeplitz_det(sym: ToeplitzSymbol, n: int) -> float:
    """D_n = det(c_{j-k}); may underflow for large n, prefer the log form."""
    return math.exp(toeplitz_log_det(sym, n))


def levinson_log_det(col: np.ndarray) -> float:
    """ln det of the Hermitian Toeplitz matrix with first column ``col``.

    Durbin-Levinson recursion: D_n is the product of the prediction-error
    variances; O(n^2) and independent of the LU path.
    """
    col = np.asarray(col, dtype=complex)
    n = col.size
    e = col[0].real
    total = math.log(e)
    a = np.zeros(0, dtype=complex)
    for m in range(1, n):
        # reflection coefficient from the Yule-Walker residual
        acc = col[m] - np.dot(a, col[m - 1:0:-1]) if m > 1 else col[1]
        k = acc / e
        a = np.concatenate([a - k * np.conj(a[::-1]), [k]])
        e = e * (1.0 - abs(k) ** 2)
        if not e > 0:
            raise ToeplitzError(f"Levinson recursion lost positivity at order {m}")
        total += math.log(e)
    return total


def _ratio(p, n, s, check):
    t = 2.0 * s / n
    if not t < math.pi:
        raise ValueError(f"need 2s/n < pi, got s={s}, n={n}")
    d_t = toeplitz_log_det(fourier_coeffs(p, t, n - 1, check=check), n)
    d_0 = toeplitz_log_det(fourier_coeffs(p, 0.0, n - 1, check=check), n)
    return d_t - d_0


def gap_ratio(p: EnsembleParams, n: int, s: float, check: bool = True,
              calibrate: bool = True) -> GapEstimate:
    """ln[D_n(2s/n) / D_n(0)] as a finite-n estimate of ln det(I - K_s).

    err_est is the change between n/2 and n, an upper estimate of the C/n error.
    """
    s = float(s)
    if not s >= 0 or not math.isfinite(s):
        raise ValueError(f"s must be finite and >= 0, got {s}")
    if not 2 <= n <= N_CAP:
        raise ValueError(f"n must lie in [2, {N_CAP}], got {n}")
    if s == 0:
        return GapEstimate(0.0, 0.0, "toeplitz", 0.0, n)
    val = _ratio(p, n, s, check)
    err = 0.0
    if calibrate and n >= 4 and 4.0 * s / n < math.pi:
        err = abs(val - _ratio(p, n // 2, s, check))
    return GapEstimate(s, val, "toeplitz", err, n)


def log_det_table(p: EnsembleParams, ns: Iterable[int], ts: Iterable[float]) -> list:
    """Rows (n, t, ln D_n(t)) for regression baselines."""
    ns, ts = sorted(set(int(n) for n in ns)), [float(t) for t in ts]
    rows = []
    for t in ts:
        sym = fourier_coeffs(p, t, max(ns) - 1)
        rows += [(n, t, toeplitz_log_det(sym, n)) for n in ns]
    return rows


def write_log_det_csv(fh, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "t", "log_det"])
    for n, t, ld in rows:
        w.writerow([n, repr(float(t)), repr(float(ld))])


__all__ = [
    "ToeplitzSymbol", "ToeplitzError", "fourier_coeffs", "toeplitz_det", "toeplitz_log_det",
    "levinson_log_det", "gap_ratio", "log_det_table", "write_log_det_csv", "N_CAP",
]
