import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from uavris.special import (AccuracyBudget, ConvergenceError, bessel_i, bessel_ratio, gamma_fn,
                            gamma_pq, lower_incomplete_gamma, regularized_lower_gamma)

mp.mp.dps = 50


def test_gamma_known_values():
    assert gamma_fn(3) == 2.0
    assert gamma_fn(1) == 1.0
    assert gamma_fn(3.5) == pytest.approx(3.3233509, abs=1e-7)
    assert gamma_fn(3.5) == pytest.approx(float(mp.mpf("1.875") * mp.sqrt(mp.pi)), rel=1e-14)


def test_gamma_domain():
    with pytest.raises(ValueError):
        gamma_fn(0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(0, 1.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(1.0, -1.0)


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, 1.0, 7.5, 40.0])
def test_incomplete_gamma_shape_one(x):
    assert lower_incomplete_gamma(1, x) == pytest.approx(-math.expm1(-x), rel=1e-13, abs=1e-300)


def test_incomplete_gamma_at_zero():
    assert lower_incomplete_gamma(7.3, 0.0) == 0.0


def test_incomplete_gamma_poisson_oracle():
    # P(n, x) = Pr{Poisson(x) >= n} for integer n
    x = mp.mpf("61.929")
    tail = 1 - mp.exp(-x) * mp.fsum(x ** i / mp.factorial(i) for i in range(50))
    expected = float(tail * mp.gamma(50))
    assert lower_incomplete_gamma(50, 61.929) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 50.0, 150.0, 400.0])
@pytest.mark.parametrize("x", [1e-3, 0.5, 10.0, 49.0, 61.929, 150.0, 399.0, 401.0, 1000.0])
def test_incomplete_gamma_against_mpmath(a, x):
    p, q = gamma_pq(a, x)
    rp = float(mp.gammainc(a, 0, x, regularized=True))
    rq = float(mp.gammainc(a, x, mp.inf, regularized=True))
    # the directly computed side carries relative accuracy
    if p < 0.5:
        assert p == pytest.approx(rp, rel=1e-11, abs=1e-300)
    else:
        assert q == pytest.approx(rq, rel=1e-11, abs=1e-300)
    assert p + q == pytest.approx(1.0, abs=1e-15)


def test_convergence_failure_raises():
    tight = AccuracyBudget(rel_tol=1e-15, max_terms=100)
    with pytest.raises(ConvergenceError):
        gamma_pq(400.0, 380.0, tight)


def test_budget_invariants():
    with pytest.raises(ValueError):
        AccuracyBudget(rel_tol=1e-3)
    with pytest.raises(ValueError):
        AccuracyBudget(max_terms=10)


@given(st.integers(min_value=1, max_value=60), st.floats(min_value=0.0, max_value=200.0))
def test_integer_shape_identity(n, x):
    poisson = 1.0 - math.exp(-x) * math.fsum(x ** i / math.factorial(i) for i in range(n))
    assert regularized_lower_gamma(n, x) == pytest.approx(poisson, abs=1e-9)


@given(st.floats(min_value=0.5, max_value=300.0), st.floats(min_value=0.0, max_value=900.0),
       st.floats(min_value=1e-3, max_value=50.0))
@settings(max_examples=200)
def test_regularized_gamma_monotone(a, x, dx):
    p = regularized_lower_gamma(a, x)
    assert 0.0 <= p <= 1.0
    assert regularized_lower_gamma(a, x + dx) >= p
    assert regularized_lower_gamma(a + dx, x) <= p


def test_bessel_edge_values():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(2, 0.0) == 0.0
    with pytest.raises(ValueError):
        bessel_i(3, 1.0)
    with pytest.raises(ValueError):
        bessel_i(0, -1.0)


@pytest.mark.parametrize("p, expected", [(0, 1.2660658), (1, 0.5651591), (2, 0.1357476)])
def test_bessel_at_one(p, expected):
    assert bessel_i(p, 1.0) == pytest.approx(expected, abs=1e-7)
    assert bessel_i(p, 1.0) == pytest.approx(float(mp.besseli(p, 1)), rel=1e-14)


@pytest.mark.parametrize("p", [0, 1, 2])
@pytest.mark.parametrize("kappa", [0.1, 0.5, 5.0, 20.0, 39.9, 40.0, 41.0, 100.0, 1000.0, 1e6])
def test_bessel_scaled_against_mpmath(p, kappa):
    ref = float(mp.besseli(p, kappa) * mp.exp(-kappa))
    assert bessel_i(p, kappa, scaled=True) == pytest.approx(ref, rel=1e-13)


@given(st.floats(min_value=0.1, max_value=50.0))
def test_bessel_recurrence(kappa):
    lhs = bessel_i(0, kappa) - bessel_i(2, kappa)
    rhs = 2.0 / kappa * bessel_i(1, kappa)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_bessel_ratio_limit():
    assert bessel_ratio(1, 1e6) == pytest.approx(1.0, abs=1e-6)
    assert bessel_ratio(1, 1.0) == pytest.approx(0.4463900, abs=5e-8)
