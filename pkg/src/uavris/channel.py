"""Equivalent channel, disk geometry and per-element samplers.

The reflected sum ``H = sum_i |H_i1| exp(-j phi_i)`` over ``N`` elements is
approximated by ``N * Ht`` with ``Ht`` Nakagami(m_tilde, omega_tilde), i.e.
``Ht^2`` gamma with shape ``k = m_tilde`` and scale ``theta = omega_tilde /
m_tilde``. The closed forms use the rounded shape ``k_hat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ScenarioParams
from .special import bessel_ratio, log_gamma


class ModelValidityError(ArithmeticError):
    """The moment-matched shape parameter has a nonpositive denominator."""


@dataclass(frozen=True)
class EquivalentChannel:
    m_tilde: float
    omega_tilde: float
    k_hat: int
    theta: float
    w: float


@dataclass(frozen=True)
class DiskGeometry:
    h: float
    R: float

    @classmethod
    def of(cls, params: ScenarioParams) -> "DiskGeometry":
        return cls(params.h, params.R)

    @property
    def d1_min(self):
        return self.h

    @property
    def d1_max(self):
        return math.hypot(self.h, self.R)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def nakagami_mean_ratio(m: float) -> float:
    """``Gamma(m + 1/2) / (Gamma(m) sqrt(m))``, the Nakagami mean per sqrt(Omega)."""
    return math.exp(log_gamma(m + 0.5) - log_gamma(m)) / math.sqrt(m)


def equivalent_spread(m: float, Omega: float, kappa: float) -> float:
    return (bessel_ratio(1, kappa) * nakagami_mean_ratio(m)) ** 2 * Omega


def normalized_threshold(params: ScenarioParams) -> float:
    """``w = gamma_thr d2^2 / (gamma_t G C0 d0^2 N^2)``.

    Coverage holds iff ``Ht^2 >= w * d1^2``.
    """
    return (params.gamma_thr * params.d2 ** 2
            / (params.gamma_t * params.G * params.C0 * params.d0 ** 2 * params.N ** 2))


def equivalent_channel(params: ScenarioParams) -> EquivalentChannel:
    omega_t = equivalent_spread(params.m, params.Omega, params.kappa)
    r2 = bessel_ratio(2, params.kappa)
    # denominator of m_tilde after dividing through by I_0
    denom = 2.0 + 2.0 * r2 - 4.0 * omega_t
    if denom <= 0.0:
        raise ModelValidityError(
            f"omega_tilde={omega_t:.6g} >= (I0+I2)/(2 I0)={(1 + r2) / 2:.6g}; "
            "moment-matched approximation not valid")
    m_t = params.N * omega_t / denom
    k_hat = max(1, round_half_up(m_t))
    return EquivalentChannel(
        m_tilde=m_t,
        omega_tilde=omega_t,
        k_hat=k_hat,
        theta=omega_t / m_t,
        w=normalized_threshold(params),
    )


def d1_cdf(geom: DiskGeometry, x):
    """CDF of the sensor-to-UAV distance, clamped outside its support.

    Returns ``(value, in_support)``.
    """
    x = np.asarray(x, dtype=float)
    in_support = (x >= geom.d1_min) & (x <= geom.d1_max)
    value = np.clip((x * x - geom.h ** 2) / geom.R ** 2, 0.0, 1.0)
    if value.ndim == 0:
        return float(value), bool(in_support)
    return value, in_support


def inv_d1_sq_pdf(geom: DiskGeometry, y):
    """PDF of ``d1^-2``: ``1 / (y R)^2`` on ``[1/(h^2+R^2), 1/h^2]``."""
    y = np.asarray(y, dtype=float)
    lo, hi = 1.0 / (geom.h ** 2 + geom.R ** 2), 1.0 / geom.h ** 2
    return np.where((y >= lo) & (y <= hi), 1.0 / (y * geom.R) ** 2, 0.0)


# ---------------------------------------------------------------------------
# samplers; every one takes a caller-owned numpy Generator

def d1_from_uniform(geom: DiskGeometry, u):
    return np.sqrt(geom.h ** 2 + geom.R ** 2 * np.asarray(u, dtype=float))


def sample_sensor_distance(geom: DiskGeometry, rng: np.random.Generator, size=None):
    return d1_from_uniform(geom, rng.random(size))


def sample_element_gain(m: float, Omega: float, rng: np.random.Generator, size=None):
    """Nakagami-m amplitudes: square roots of gamma(m, Omega/m) draws."""
    return np.sqrt(rng.gamma(m, Omega / m, size))


def sample_phase_error(kappa: float, rng: np.random.Generator, size=None):
    """Von Mises(0, kappa) phase errors in radians.

    numpy's generator implements the Best-Fisher rejection sampler, which is
    exact for the distribution; ``kappa = 0`` gives a uniform angle.
    """
    if kappa == 0:
        return rng.uniform(-math.pi, math.pi, size)
    return rng.vonmises(0.0, kappa, size)


def link_budget(params: ScenarioParams, d1):
    """Deterministic SNR factor ``gamma_t C0 G (d0 / (d1 d2))^2``."""
    d1 = np.asarray(d1, dtype=float)
    return params.gamma_t * params.C0 * params.G * (params.d0 / (d1 * params.d2)) ** 2


def reflected_power(amplitudes, phases):
    """``|sum_i a_i exp(-j phi_i)|^2`` along the last axis."""
    re = np.sum(amplitudes * np.cos(phases), axis=-1)
    im = np.sum(amplitudes * np.sin(phases), axis=-1)
    return re * re + im * im


def combined_snr(params: ScenarioParams, d1, amplitudes, phases):
    """Received SNR for given element amplitudes and phase errors.

    The ``N^2`` array gain is implicit in the unnormalized element sum.
    """
    return link_budget(params, d1) * reflected_power(amplitudes, phases)


def sample_reflected_power(params: ScenarioParams, rng: np.random.Generator, size=1):
    """Reflected power draws with fresh amplitudes and phases for every draw."""
    shape = (size, params.N)
    a = sample_element_gain(params.m, params.Omega, rng, shape)
    phi = sample_phase_error(params.kappa, rng, shape)
    return reflected_power(a, phi)


def sample_combined_gain(params: ScenarioParams, d1, rng: np.random.Generator, size=None):
    """Received SNR for a sensor at distance ``d1`` from element-level draws."""
    n = 1 if size is None else size
    snr = link_budget(params, d1) * sample_reflected_power(params, rng, n)
    return float(snr[0]) if size is None else snr
