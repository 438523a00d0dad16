import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapkit.quadrature import (QuadratureError, composite_legendre, gauss_jacobi_left, gauss_legendre,
                               jacobi_moment, map_rule)


def test_legendre_small_rules():
    r1 = gauss_legendre(1)
    assert r1.nodes[0] == pytest.approx(0.0, abs=1e-15) and r1.weights[0] == pytest.approx(2.0)
    r2 = gauss_legendre(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-14)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], rtol=1e-14)


def test_legendre_x30():
    r = gauss_legendre(16)
    assert abs(r.integrate(lambda x: x ** 30) - 2 / 31) < 1e-12


def test_jacobi_one_point_rules():
    r = gauss_jacobi_left(1, 1.0)
    assert r.nodes[0] == pytest.approx(2 / 3) and r.weights[0] == pytest.approx(0.5)
    assert r.integrate(lambda x: x) == pytest.approx(1 / 3)
    r0 = gauss_jacobi_left(1, 0.0)
    assert r0.nodes[0] == pytest.approx(0.5) and r0.weights[0] == pytest.approx(1.0)


def test_map_rule_examples():
    r = map_rule(gauss_legendre(1), 0.0, 4.0)
    assert r.nodes[0] == pytest.approx(2.0) and r.weights[0] == pytest.approx(4.0)
    j = map_rule(gauss_jacobi_left(1, 1.0), 0.0, 2.0)
    assert j.nodes[0] == pytest.approx(4 / 3) and j.weights[0] == pytest.approx(2.0)
    g = gauss_legendre(7)
    same = map_rule(g, -1.0, 1.0)
    np.testing.assert_array_equal(same.nodes, g.nodes)
    np.testing.assert_array_equal(same.weights, g.weights)


@pytest.mark.parametrize("bad", [0, -3, 2.5])
def test_rejects_bad_sizes(bad):
    with pytest.raises(QuadratureError):
        gauss_legendre(bad)


def test_rejects_nonintegrable_exponent():
    with pytest.raises(QuadratureError):
        gauss_jacobi_left(4, -1.0)


def test_cap():
    with pytest.raises(QuadratureError):
        gauss_legendre(5000)


def test_rules_are_read_only():
    r = gauss_legendre(4)
    with pytest.raises(ValueError):
        r.nodes[0] = 1.0


@pytest.mark.parametrize("n", [2, 4, 8, 16])
@pytest.mark.parametrize("exponent", [None, -0.6, 0.0, 0.6, 2.0, 3.4])
def test_exactness_random_polynomials(n, exponent):
    rng = np.random.default_rng(1000 * n + int(10 * (exponent or 0)))
    coef = rng.uniform(0.5, 1.5, 2 * n)  # positive: the exact value cannot cancel
    if exponent is None:
        r = map_rule(gauss_legendre(n), 0.0, 1.0)
        g = 0.0
    else:
        r = gauss_jacobi_left(n, exponent)
        g = exponent
    exact = sum(c / (k + g + 1) for k, c in enumerate(coef))
    approx = r.integrate(lambda x: np.polyval(coef[::-1], x))
    assert abs(approx - exact) / abs(exact) < 1e-11


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 60), exponent=st.floats(-0.95, 6.0),
       lo=st.floats(-5, 5), width=st.floats(1e-3, 10))
def test_positivity_interiority_moment(n, exponent, lo, width):
    r = map_rule(gauss_jacobi_left(n, exponent), lo, lo + width)
    assert np.all(r.weights > 0)
    assert np.all((r.nodes > lo) & (r.nodes < lo + width))
    assert abs(r.weights.sum() - r.moment()) <= 1e-12 * r.moment()
    assert r.moment() == pytest.approx(jacobi_moment(exponent, lo, lo + width), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 200))
def test_legendre_mass_and_symmetry(n):
    r = gauss_legendre(n)
    assert abs(r.weights.sum() - 2.0) < 1e-13
    np.testing.assert_allclose(r.nodes, -r.nodes[::-1], atol=0)


def test_large_jacobi_rule_small_weights():
    r = gauss_jacobi_left(512, 1.4)
    assert np.all(r.weights > 0)
    assert abs(r.weights.sum() - 1 / 2.4) < 1e-13
    assert abs(r.integrate(lambda x: x ** 900) - 1 / 902.4) < 1e-12 / 902.4


def test_composite_legendre():
    x, w = composite_legendre([0.0, 0.5, 2.0, 3.0], 6)
    assert x.size == 18
    assert abs(np.dot(w, np.cos(x)) - math.sin(3.0)) < 1e-12
