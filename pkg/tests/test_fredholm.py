import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapkit.fredholm import ConvergenceError, GapEstimate, gap_log_det, nystrom_matrix, trace_estimate
from gapkit.kernel import EnsembleParams, chf_kernel
from gapkit.quadrature import composite_legendre
from gapkit.specfun import log_bessel_i0

P0 = EnsembleParams(0, 0)
PB = EnsembleParams(0.5, 0)
PC = EnsembleParams(0.3, 0.5)


def test_gap_estimate_validation():
    with pytest.raises(ValueError):
        GapEstimate(1.0, -0.1, "bogus")
    with pytest.raises(ValueError):
        GapEstimate(1.0, -0.1, "fredholm", -1.0)
    assert GapEstimate(1.0, math.log(0.5), "fredholm").det == pytest.approx(0.5)


def test_empty_interval():
    est = gap_log_det(PC, 0.0)
    assert est.log_det == 0.0 and est.err_est == 0.0


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        gap_log_det(P0, -1.0)
    with pytest.raises(ValueError):
        gap_log_det(P0, 1.0, n=2)


def test_bessel_closed_form():
    est = gap_log_det(PB, 1.0, n=32)
    assert abs(est.log_det - (-0.5 + log_bessel_i0(1.0))) < 1e-12
    assert est.log_det == pytest.approx(-0.26410, abs=2e-5)
    assert est.det == pytest.approx(0.76790, abs=2e-5)


def test_sine_self_convergence():
    lo = gap_log_det(P0, 1.0, n=64).log_det
    hi = gap_log_det(P0, 1.0, n=256).log_det
    assert abs(lo - hi) < 1e-10


@pytest.mark.parametrize("p", [P0, PB, PC, EnsembleParams(-0.3, 0.2)], ids=str)
def test_small_s_trace_law(p):
    for s in (0.05, 0.025):
        tr = trace_estimate(p, s)
        ld = gap_log_det(p, s).log_det
        assert abs(ld + tr) < 5 * s * tr * tr / max(s, 1e-300) + 1e-14
    if p == P0:
        assert gap_log_det(P0, 1e-3).log_det == pytest.approx(-2e-3 / math.pi, rel=1e-3)


def test_trace_examples():
    assert trace_estimate(P0, 0.5) == pytest.approx(1 / math.pi, rel=1e-13)
    assert trace_estimate(PB, 1e-4) < 1e-7
    # refinement oracle: composite rule on a graded mesh
    s = 0.5
    brk = np.concatenate([[0.0], 0.5 * s * 2.0 ** -np.arange(40)[::-1], [s]])
    brk = np.unique(brk)
    x, w = composite_legendre(brk, 20)
    diag = np.array([chf_kernel(xi, xi, PC) + chf_kernel(-xi, -xi, PC) for xi in x])
    assert abs(trace_estimate(PC, s) - np.dot(w, diag)) < 1e-9


@pytest.mark.parametrize("p", [P0, PC, EnsembleParams(1, 0)], ids=str)
def test_monotone_and_bounded(p):
    grid = np.arange(0.25, 6.01, 0.25)
    vals = [gap_log_det(p, s, n=40).log_det for s in grid]
    assert all(v <= 0 for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_spectral_convergence(alpha):
    p = EnsembleParams(alpha, 0)
    vals = {n: gap_log_det(p, 3.0, n=n).log_det for n in (4, 8, 16, 32, 64)}
    diffs = [abs(vals[n] - vals[2 * n]) for n in (4, 8, 16, 32)]
    for a, b in zip(diffs, diffs[1:]):
        assert b <= 1e-10 or b <= a / 10


def test_tolerance_doubling_and_failure():
    est = gap_log_det(PC, 2.0, n=8, tol=1e-11)
    assert est.err_est <= 1e-11 and est.nodes >= 16
    with pytest.raises(ConvergenceError):
        gap_log_det(PC, 9.0, n=8, tol=1e-16, n_max=32)


@settings(max_examples=15, deadline=None)
@given(a=st.floats(-0.45, 2.0), b=st.floats(-1.5, 1.5), s=st.floats(0.05, 3.0))
def test_matrix_symmetric_det_in_unit_interval(a, b, s):
    p = EnsembleParams(a, b)
    m = nystrom_matrix(p, s, 12)
    assert np.array_equal(m, m.T)
    est = gap_log_det(p, s, n=24)
    assert est.log_det <= 0 and 0 < est.det <= 1
