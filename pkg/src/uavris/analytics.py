"""Closed-form coverage, per-round success, transmissions and throughput.

Shapes and scales come from :class:`~uavris.channel.EquivalentChannel`. All
coverage-type expressions reduce to the partial sum

    C(k) = theta / (R^2 w) * sum_{i=0}^{k-1} [P(i+1, b) - P(i+1, a)],

with ``a = h^2 w / theta``, ``b = (h^2 + R^2) w / theta`` and ``P`` the
regularized lower incomplete gamma function, since
``gamma(i+1, x) / i! = P(i+1, x)``. ``C(k)`` is the probability that a
gamma(k, theta) channel power exceeds ``w d1^2`` for ``d1^2`` uniform on
``[h^2, h^2 + R^2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .channel import DiskGeometry, EquivalentChannel, equivalent_channel
from .config import ScenarioParams
from .special import ConvergenceError, gamma_p_diff, gamma_pq

NUMERIC = "numeric-integration"
PAPER = "closed-form-paper"
CONSISTENT = "closed-form-consistent"
CLOSED_FORM = "closed-form"
METHODS = (NUMERIC, PAPER, CONSISTENT)

QUAD_ABS_TOL = 1e-9
QUAD_MAX_ERROR = 1e-8


@dataclass(frozen=True)
class CoverageResult:
    value: float
    method: str
    l_rounds: int


@dataclass(frozen=True)
class MacAnalytics:
    t_bar: float
    p_suc: float
    r_bar: float


def _limits(params: ScenarioParams, chan: EquivalentChannel):
    a = params.h ** 2 * chan.w / chan.theta
    b = (params.h ** 2 + params.R ** 2) * chan.w / chan.theta
    return a, b


def _prefactor(params, chan):
    return chan.theta / (params.R ** 2 * chan.w)


def partial_coverage_sum(params, chan, start, stop):
    """``sum_{i=start}^{stop-1} [P(i+1, b) - P(i+1, a)]`` (unscaled)."""
    a, b = _limits(params, chan)
    return math.fsum(gamma_p_diff(i + 1.0, a, b) for i in range(start, stop))


def _outage_tail(params, chan, k: int) -> float:
    """``1 - C(k)`` as the positive tail ``sum_{i>=k}`` of the same series.

    The full series sums to ``b - a``, so near full coverage the tail gives
    the complement without cancellation.
    """
    a, b = _limits(params, chan)
    terms = []
    i = k
    while True:
        t = gamma_p_diff(i + 1.0, a, b)
        terms.append(t)
        i += 1
        if i > b and t <= 1e-17 * math.fsum(terms):
            break
        if i - k > 100_000:
            raise ConvergenceError("outage tail did not converge")
    return math.fsum(terms) / (b - a)


def coverage_of_shape(params, chan, k: int) -> float:
    """Probability that a gamma(k, theta) power clears ``w d1^2``."""
    if k <= 0:
        return 0.0
    if chan.w == 0.0:
        return 1.0
    value = _prefactor(params, chan) * partial_coverage_sum(params, chan, 0, k)
    if value > 0.5:
        value = 1.0 - _outage_tail(params, chan, k)
    return value


def coverage(params: ScenarioParams, chan: EquivalentChannel | None = None) -> CoverageResult:
    chan = chan or equivalent_channel(params)
    return CoverageResult(coverage_of_shape(params, chan, chan.k_hat), CLOSED_FORM, 1)


def coverage_cc(params: ScenarioParams, chan: EquivalentChannel | None, l: int) -> CoverageResult:
    """Coverage after combining ``l`` i.i.d. copies (moment-matched shape ``l * k_hat``)."""
    chan = chan or equivalent_channel(params)
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    return CoverageResult(coverage_of_shape(params, chan, l * chan.k_hat), CLOSED_FORM, l)


# ---------------------------------------------------------------------------
# success exactly at round l

@lru_cache(maxsize=None)
def alternating_binomial_coef(k_b: int, mu: int) -> float:
    """``sum_nu C(mu, nu) (-1)^(mu-nu) / (k_b + mu - nu)`` in exact arithmetic.

    Equals the Beta function ``B(k_b, mu + 1)``; summed in floating point the
    alternating terms cancel catastrophically for mu beyond ~40.
    """
    total = Fraction(0)
    for nu in range(mu + 1):
        total += Fraction(math.comb(mu, nu) * (-1) ** (mu - nu), k_b + mu - nu)
    return float(total)


def conditional_round_success(chan: EquivalentChannel, l: int, d1_sq: float,
                              form: str = "window") -> float:
    """Success exactly at round ``l`` given the sensor distance.

    With ``tau = w d1^2 / theta``, ``k_b = k_hat`` and ``k_a = (l-1) k_hat``
    the three-term form (``form="terms"``) is

        P(k_a, tau) - P(k_b, tau)
            + exp(-tau) sum_{mu<k_a} tau^(k_b+mu) B(k_b, mu+1) / (mu! Gamma(k_b)),

    whose correction equals ``P(k_b, tau) - P(k_a+k_b, tau)``. The default
    ``form="window"`` sums the same quantity as the positive Poisson terms
    ``exp(-tau) tau^j / j!`` for ``k_a <= j < k_a + k_b``, which cannot
    cancel below zero.
    """
    k_b = chan.k_hat
    k_a = (l - 1) * k_b
    tau = chan.w * d1_sq / chan.theta
    if k_a == 0:
        return gamma_pq(k_b, tau)[1]
    if tau == 0.0:
        return 0.0
    log_tau = math.log(tau)
    if form == "window":
        return math.fsum(math.exp(-tau + j * log_tau - math.lgamma(j + 1.0))
                         for j in range(k_a, k_a + k_b))
    if form != "terms":
        raise ValueError(f"unknown form {form!r}")
    p_a = gamma_pq(k_a, tau)[0]
    p_b = gamma_pq(k_b, tau)[0]
    corr = 0.0
    for mu in range(k_a):
        # B(k_b, mu+1) / (mu! Gamma(k_b)) = 1 / Gamma(k_b + mu + 1)
        corr += math.exp(-tau + (k_b + mu) * log_tau - math.lgamma(k_b + mu + 1.0))
    return p_a - p_b + corr


def _round_success_numeric(params, chan, l):
    geom = DiskGeometry.of(params)
    lo, hi = 1.0 / (geom.h ** 2 + geom.R ** 2), 1.0 / geom.h ** 2

    def integrand(y):
        return conditional_round_success(chan, l, 1.0 / y) / (y * geom.R) ** 2

    value, err = integrate.quad(integrand, lo, hi, epsabs=QUAD_ABS_TOL, epsrel=1e-10, limit=200)
    if err > QUAD_MAX_ERROR:
        raise ConvergenceError(f"quadrature error estimate {err:.3g} exceeds {QUAD_MAX_ERROR}")
    return value


def _round_success_closed(params, chan, l, first_index):
    k_b = chan.k_hat
    k_a = (l - 1) * k_b
    if chan.w == 0.0:
        return 1.0 if l == 1 else 0.0
    pref = _prefactor(params, chan)
    a, b = _limits(params, chan)
    if first_index == 0:
        # the two leading sums are coverages of shape k_b and k_a
        t1 = coverage_of_shape(params, chan, k_b)
        t2 = coverage_of_shape(params, chan, k_a)
    else:
        t1 = pref * partial_coverage_sum(params, chan, first_index, k_b)
        t2 = pref * partial_coverage_sum(params, chan, first_index, k_a)
    log_theta, log_w = math.log(chan.theta), math.log(chan.w)
    t3 = []
    for mu in range(k_a):
        s = mu + k_b + 1.0
        diff = gamma_p_diff(s, a, b)
        if diff <= 0.0:
            continue
        # gamma(s, b) - gamma(s, a) = Gamma(s) * diff
        log_mag = (-math.lgamma(k_b) - k_b * log_theta - math.lgamma(mu + 1.0) - mu * log_theta
                   + (k_b + mu) * log_w + s * (log_theta - log_w)
                   - 2.0 * math.log(params.R) + math.lgamma(s) + math.log(diff))
        t3.append(alternating_binomial_coef(k_b, mu) * math.exp(log_mag))
    return t1 - t2 + math.fsum(t3)


def round_success(params: ScenarioParams, chan: EquivalentChannel | None, l: int,
                  method: str = NUMERIC) -> CoverageResult:
    """Probability that decoding first succeeds after exactly ``l`` combined copies.

    Methods:
        ``numeric-integration`` (reference): integrates the conditional
            success probability over the ``d1^-2`` density by adaptive
            Gauss-Kronrod quadrature. For ``l = 1`` returns the coverage.
        ``closed-form-paper``: the three-term closed form with its sums
            starting at index 1.
        ``closed-form-consistent``: the same formula with sums from index 0,
            which restores equality with the coverage at ``l = 1``.
    """
    chan = chan or equivalent_channel(params)
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    if method == NUMERIC:
        if l == 1:
            return CoverageResult(coverage(params, chan).value, NUMERIC, 1)
        return CoverageResult(_round_success_numeric(params, chan, l), NUMERIC, l)
    if method == PAPER:
        return CoverageResult(_round_success_closed(params, chan, l, 1), PAPER, l)
    if method == CONSISTENT:
        return CoverageResult(_round_success_closed(params, chan, l, 0), CONSISTENT, l)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def round_success_profile(params, chan=None, L=None, method=NUMERIC):
    """``[P_s,1 .. P_s,L]`` and ``[P_c,1 .. P_c,L]`` as arrays."""
    chan = chan or equivalent_channel(params)
    L = params.L_max if L is None else L
    ps = np.array([round_success(params, chan, l, method).value for l in range(1, L + 1)])
    pc = np.array([coverage_cc(params, chan, l).value for l in range(1, L + 1)])
    return ps, pc


# ---------------------------------------------------------------------------
# MAC layer

def no_collision_probability(params: ScenarioParams) -> float:
    return (1.0 - params.rho_access) ** (params.S_sensors - 1)


def avg_transmissions(params: ScenarioParams, ps_l, pc_l, combinatorial: bool = False) -> float:
    """Average number of transmissions of the tagged sensor.

    With ``combinatorial=True`` every term is weighted by the number of
    orderings of collided and clean rounds (``C(i-1, j-1)`` for decoding at
    round ``i`` after ``j`` clean rounds, ``C(L-1, i)`` in the last-round term).
    """
    L = len(ps_l)
    if len(pc_l) != L:
        raise ValueError("ps_l and pc_l must both have length L")
    q = no_collision_probability(params)
    c = 1.0 - q
    total = 0.0
    for i in range(1, L):
        inner = sum((math.comb(i - 1, j - 1) if combinatorial else 1)
                    * c ** (i - j) * q ** j * ps_l[j - 1] for j in range(1, i + 1))
        total += i * inner
    last = sum((math.comb(L - 1, i) if combinatorial else 1)
               * c ** (L - 1 - i) * q ** i * (1.0 - pc_l[i - 1]) for i in range(1, L))
    last += c ** (L - 1)
    return total + L * last


def p_success(params: ScenarioParams, ps_l, combinatorial: bool = False) -> float:
    """Probability the tagged sensor's message is decoded within ``L`` rounds."""
    L = len(ps_l)
    q = no_collision_probability(params)
    c = 1.0 - q
    return sum((math.comb(i - 1, j - 1) if combinatorial else 1)
               * c ** (i - j) * q ** j * ps_l[j - 1]
               for i in range(1, L + 1) for j in range(1, i + 1))


def p_success_no_cc(params: ScenarioParams, p_c: float) -> float:
    """Plain slotted ALOHA with Bernoulli access of the tagged sensor."""
    return params.rho_access * no_collision_probability(params) * p_c


def rate_per_success(params: ScenarioParams) -> float:
    return params.bandwidth_hz * math.log2(1.0 + params.gamma_thr)


def avg_throughput(params: ScenarioParams, ps_l, t_bar: float,
                   combinatorial: bool = False, no_cc: bool = False) -> MacAnalytics:
    """Average throughput in bit/s.

    ``no_cc=True`` uses the no-combining success probability (which includes
    the tagged sensor's own access probability) with one transmission.
    """
    if no_cc:
        p = p_success_no_cc(params, ps_l[0])
        t_bar = 1.0
    else:
        p = p_success(params, ps_l, combinatorial)
    p, t_bar = float(p), float(t_bar)
    return MacAnalytics(t_bar=t_bar, p_suc=p, r_bar=rate_per_success(params) * p / t_bar)


def mac_analytics(params: ScenarioParams, chan=None, method: str = NUMERIC,
                  combinatorial: bool = False) -> MacAnalytics:
    chan = chan or equivalent_channel(params)
    ps, pc = round_success_profile(params, chan, params.L_max, method)
    t_bar = avg_transmissions(params, ps, pc, combinatorial)
    return avg_throughput(params, ps, t_bar, combinatorial)
