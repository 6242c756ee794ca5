"""Special functions used by the closed forms.

Gamma and log-gamma come from :mod:`math`. The regularized incomplete gamma
pair uses a power series below ``x = a + 1`` and a modified-Lentz continued
fraction above it. Modified Bessel functions of the first kind (orders 0-2)
use the ascending series for moderate arguments and the Hankel asymptotic
expansion for large ones, with an exponentially scaled variant for ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_TINY = 1e-300


class ConvergenceError(ArithmeticError):
    """A series or continued fraction hit ``max_terms`` before converging."""


@dataclass(frozen=True)
class AccuracyBudget:
    rel_tol: float = 1e-15
    max_terms: int = 5000

    def __post_init__(self):
        if not 0.0 < self.rel_tol <= 1e-6:
            raise ValueError("rel_tol must lie in (0, 1e-6]")
        if self.max_terms < 100:
            raise ValueError("max_terms must be >= 100")


DEFAULT_BUDGET = AccuracyBudget()


def gamma_fn(x: float) -> float:
    if x <= 0:
        raise ValueError(f"gamma_fn: domain error, x={x} <= 0")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    if x <= 0:
        raise ValueError(f"log_gamma: domain error, x={x} <= 0")
    return math.lgamma(x)


def log_factorial(n) -> float:
    return math.lgamma(n + 1.0)


def _series_p(a, x, budget):
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(budget.max_terms):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * budget.rel_tol:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ConvergenceError(f"incomplete gamma series failed: a={a}, x={x}")


def _cf_q(a, x, budget):
    # Q(a, x) by the Legendre continued fraction, modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, budget.max_terms + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < budget.rel_tol:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction failed: a={a}, x={x}")


def gamma_pq(a: float, x: float, budget: AccuracyBudget = DEFAULT_BUDGET):
    """Return ``(P(a, x), Q(a, x))``, each accurate in its own right.

    Whichever of the two is computed directly carries full relative
    precision; the other is its complement.
    """
    if a <= 0 or x < 0:
        raise ValueError(f"incomplete gamma: domain error, a={a}, x={x}")
    if x == 0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    if x < a + 1.0:
        p = _series_p(a, x, budget)
        return p, 1.0 - p
    q = _cf_q(a, x, budget)
    return 1.0 - q, q


def regularized_lower_gamma(a, x, budget=DEFAULT_BUDGET):
    return gamma_pq(a, x, budget)[0]


def regularized_upper_gamma(a, x, budget=DEFAULT_BUDGET):
    return gamma_pq(a, x, budget)[1]


def lower_incomplete_gamma(a, x, budget=DEFAULT_BUDGET):
    """Unregularized lower incomplete gamma ``gamma(a, x)``."""
    return gamma_pq(a, x, budget)[0] * math.gamma(a)


def log_lower_incomplete_gamma(a, x, budget=DEFAULT_BUDGET):
    p = gamma_pq(a, x, budget)[0]
    if p == 0.0:
        return -math.inf
    return math.log(p) + math.lgamma(a)


def gamma_p_diff(a, x_lo, x_hi, budget=DEFAULT_BUDGET):
    """``P(a, x_hi) - P(a, x_lo)`` without cancellation in either tail."""
    p_lo, q_lo = gamma_pq(a, x_lo, budget)
    p_hi, q_hi = gamma_pq(a, x_hi, budget)
    if p_hi <= 0.5:
        return p_hi - p_lo
    return q_lo - q_hi


# ---------------------------------------------------------------------------
# Modified Bessel functions of the first kind

_BESSEL_ORDERS = (0, 1, 2)
_ASYMPTOTIC_FROM = 40.0


def _bessel_series(p, kappa, budget):
    half = 0.5 * kappa
    term = half ** p / math.factorial(p)
    total = term
    q = half * half
    for k in range(1, budget.max_terms):
        term *= q / (k * (k + p))
        total += term
        if term < total * budget.rel_tol:
            return total
    raise ConvergenceError(f"Bessel series failed: p={p}, kappa={kappa}")


def _bessel_asymptotic_scaled(p, kappa, budget):
    # e^-x I_p(x) ~ 1/sqrt(2 pi x) * sum_k (-1)^k a_k(p) / x^k
    mu = 4.0 * p * p
    term = 1.0
    total = 1.0
    prev = math.inf
    for k in range(1, budget.max_terms):
        term *= -(mu - (2 * k - 1) ** 2) / (k * 8.0 * kappa)
        if abs(term) >= prev:
            break  # the expansion is asymptotic; stop at the smallest term
        total += term
        prev = abs(term)
        if abs(term) < abs(total) * budget.rel_tol:
            break
    return total / math.sqrt(2.0 * math.pi * kappa)


def bessel_i(p: int, kappa: float, scaled: bool = False,
             budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Modified Bessel function ``I_p(kappa)`` for ``p`` in {0, 1, 2}.

    With ``scaled=True`` returns ``exp(-kappa) * I_p(kappa)``, which stays
    finite for any ``kappa`` and is what Bessel ratios should use.
    """
    if p not in _BESSEL_ORDERS:
        raise ValueError(f"bessel_i: unsupported order p={p}")
    if kappa < 0:
        raise ValueError(f"bessel_i: domain error, kappa={kappa} < 0")
    if kappa == 0:
        return 1.0 if p == 0 else 0.0
    if kappa < _ASYMPTOTIC_FROM:
        value = _bessel_series(p, kappa, budget)
        return value * math.exp(-kappa) if scaled else value
    value = _bessel_asymptotic_scaled(p, kappa, budget)
    return value if scaled else value * math.exp(kappa)


def bessel_ratio(p: int, kappa: float) -> float:
    """``I_p(kappa) / I_0(kappa)``; tends to 1 as kappa grows."""
    if kappa == 0:
        return 1.0 if p == 0 else 0.0
    return bessel_i(p, kappa, scaled=True) / bessel_i(0, kappa, scaled=True)
