"""Compiled element-level channel kernel for the Monte-Carlo simulator."""

import math

import numba as nb
import numpy as np

# numpy switches to a wrapped normal above this concentration as well
_VM_NORMAL_FROM = 1e5
_VM_UNIFORM_BELOW = 1e-8


@nb.njit(cache=True)
def _best_fisher_r(kappa):
    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    return (1.0 + rho * rho) / (2.0 * rho)


@nb.njit(cache=True)
def _vonmises_cos_sin(rng, kappa, r):
    """(cos phi, sin phi) for phi ~ von Mises(0, kappa), Best-Fisher rejection."""
    if kappa < _VM_UNIFORM_BELOW:
        phi = math.pi * (2.0 * rng.random() - 1.0)
        return math.cos(phi), math.sin(phi)
    if kappa > _VM_NORMAL_FROM:
        phi = rng.standard_normal() / math.sqrt(kappa)
        return math.cos(phi), math.sin(phi)
    while True:
        z = math.cos(math.pi * rng.random())
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        u = rng.random()
        if c * (2.0 - c) - u > 0.0:
            break
        if u > 0.0 and math.log(c / u) + 1.0 - c >= 0.0:
            break
    s = math.sqrt(max(0.0, 1.0 - f * f))
    if rng.random() < 0.5:
        s = -s
    return f, s


@nb.njit(cache=True)
def reflected_power(rng, out, n_elements, m, omega, kappa):
    """Fill ``out`` with ``|sum_i a_i exp(-j phi_i)|^2`` draws, one per cell."""
    scale = omega / m
    r = _best_fisher_r(kappa) if _VM_UNIFORM_BELOW <= kappa <= _VM_NORMAL_FROM else 0.0
    flat = out.reshape(-1)
    for t in range(flat.size):
        re = 0.0
        im = 0.0
        for _ in range(n_elements):
            a = math.sqrt(rng.standard_gamma(m) * scale)
            c, s = _vonmises_cos_sin(rng, kappa, r)
            re += a * c
            im += a * s
        flat[t] = re * re + im * im


@nb.njit(cache=True)
def vonmises_cos_sin(rng, kappa, size):
    """Vector of (cos phi, sin phi) draws, exposed for testing the sampler."""
    r = _best_fisher_r(kappa) if _VM_UNIFORM_BELOW <= kappa <= _VM_NORMAL_FROM else 0.0
    out = np.empty((size, 2))
    for t in range(size):
        out[t, 0], out[t, 1] = _vonmises_cos_sin(rng, kappa, r)
    return out
