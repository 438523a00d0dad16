import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gapkit.asympt import (dyson_log, h_large_t, h_small_t, large_gap_log, log_barnes_constant, rational_tail,
                           regularised_h, total_integral_check)
from gapkit.fredholm import gap_log_det
from gapkit.kernel import EnsembleParams
from gapkit.specfun import bessel_i0_ratio, log_bessel_i0

P0 = EnsembleParams(0, 0)
PB = EnsembleParams(0.5, 0)


def test_dyson_form():
    assert dyson_log(1.0) == pytest.approx(-0.9385011, abs=1e-7)
    assert dyson_log(8.0) == pytest.approx(-32.95836, abs=1e-5)
    for s in (0.5, 3.0, 8.0, 20.0):
        assert abs(dyson_log(s) - large_gap_log(P0, s)) < 1e-12


def test_bessel_constant():
    assert log_barnes_constant(PB) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-12)
    assert large_gap_log(PB, 4.0) == pytest.approx(-4 - math.log(2) - 0.5 * math.log(2 * math.pi), abs=1e-12)
    assert large_gap_log(PB, 4.0) == pytest.approx(-5.612086, abs=1e-6)
    # O(1/s) against the Bessel closed form
    assert abs(large_gap_log(PB, 4.0) - (-8 + log_bessel_i0(4.0))) < 0.05


def test_barnes_constant_against_mpmath():
    a, b = 0.3, 0.5
    with mpmath.workdps(30):
        g = mpmath.barnesg
        k = (mpmath.sqrt(mpmath.pi) * g(0.5) ** 2 * g(1 + 2 * a)
             / (2 ** (2 * a * a) * g(1 + a + 1j * b) * g(1 + a - 1j * b)))
    assert log_barnes_constant(EnsembleParams(a, b)) == pytest.approx(float(mpmath.re(mpmath.log(k))), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-0.45, 2), b=st.floats(0, 2), s=st.floats(0.5, 20))
def test_invariant_under_b_flip(a, b, s):
    assert large_gap_log(EnsembleParams(a, b), s) == pytest.approx(large_gap_log(EnsembleParams(a, -b), s),
                                                                   abs=1e-12)


def test_domain():
    with pytest.raises(ValueError):
        large_gap_log(P0, 0.0)
    with pytest.raises(ValueError):
        dyson_log(-1.0)
    with pytest.raises(ValueError):
        total_integral_check(P0, 0.0)


def test_ray_laws():
    assert h_small_t(P0, 0.3) == pytest.approx(-1 / (2 * math.pi))
    assert h_small_t(P0, 7.0) == pytest.approx(-1 / (2 * math.pi))
    assert h_large_t(P0, 40.0) == pytest.approx(-2.50625)
    t = 60.0
    assert h_large_t(PB, t) == pytest.approx(-t / 16 + 0.25 - 0.5 / t)
    exact = -t / 16 + 0.25 * bessel_i0_ratio(t / 4)
    assert abs(h_large_t(PB, t) - exact) < 1 / t ** 2


def test_ray_substitution_chain_rule():
    # h(t) = -i H(-i t): the large-s law H ~ s/16 + i a/2 - kappa i... is checked
    # through the Bessel closed form H = s/16 + (i/4) I0'(is/4)/I0(is/4).
    for t in (0.5, 3.0, 11.0):
        s = -1j * t
        big_h = s / 16 + 0.25j * bessel_i0_ratio(t / 4)
        assert (-1j * big_h).real == pytest.approx(-t / 16 + 0.25 * bessel_i0_ratio(t / 4))


@pytest.mark.parametrize("p", [P0, EnsembleParams(0.3, 0.5), EnsembleParams(1, 0)], ids=str)
def test_consistency_chain(p):
    d = {s: gap_log_det(p, s, n=64).log_det - large_gap_log(p, s) for s in (4.0, 6.0, 8.0)}
    assert abs(d[8.0]) < abs(d[6.0]) < abs(d[4.0])
    # O(1/s): successive ratios track the s-ratio within a generous band
    assert 0.3 < d[6.0] / d[4.0] < 0.9 and 0.4 < d[8.0] / d[6.0] < 0.95


def test_total_integral_bessel_closed_form():
    # both sides from the Bessel trajectory only, via scipy quadrature
    tc = 8.0
    head = -tc * tc / 32 + log_bessel_i0(tc / 4)
    g = lambda t: 0.25 * bessel_i0_ratio(t / 4) - 0.25 + 0.5 / t
    tail, _ = quad(g, tc, np.inf, epsabs=1e-13, limit=400)
    chk = total_integral_check(PB, tc)
    assert abs(head + tail - chk.rhs) < 1e-10
    assert chk.defect < 1e-5


def test_total_integral_sine_rhs():
    chk = total_integral_check(P0, 8.0)
    assert chk.rhs == pytest.approx(-2.61179, abs=1e-5)
    assert chk.defect < 1e-4 and chk.t_end == 36.0


def test_total_integral_short_trace(trace_of):
    chk = total_integral_check(P0, 8.0, trace=trace_of(0.0, 0.0, 16.0, 1e-12))
    assert math.isinf(chk.remainder) and math.isnan(chk.lhs)


def test_rational_tail_exact_for_rational_data():
    t = np.linspace(20, 36, 200)
    g = (1.0 + 2.0 / t) / (t * t * (1 + 0.5 / t))
    exact, _ = quad(lambda x: (1.0 + 2.0 / x) / (x * x * (1 + 0.5 / x)), 36, np.inf, epsabs=1e-14)
    assert abs(rational_tail(t, g, 36.0, 1) - exact) < 1e-12


def test_regularised_h_vanishes_on_law():
    t = np.array([10.0, 20.0])
    p = EnsembleParams(0.3, 0.5)
    assert np.allclose(regularised_h(p, t, [h_large_t(p, x) for x in t]), 0, atol=1e-14)
