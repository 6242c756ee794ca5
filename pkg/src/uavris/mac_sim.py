"""Monte-Carlo oracle: element-level channel draws and a tagged-sensor MAC.

Trials are grouped in fixed-size blocks. Block ``b`` draws from a generator
seeded by ``SeedSequence(seed, spawn_key=(stream, b))``, so an estimate
depends only on ``(seed, trials, params)`` and never on how many workers
evaluated the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import _kernels
from .analytics import rate_per_success
from .channel import DiskGeometry, equivalent_channel, link_budget, sample_reflected_power
from .config import ScenarioParams

BLOCK_TRIALS = 1 << 15
Z95 = 1.959963984540054
METRICS = ("coverage", "coverage_cc", "round_success", "t_bar", "p_suc", "r_bar")

ELEMENT = "element"
GAMMA_FAST = "gamma"


@dataclass(frozen=True)
class McEstimate:
    mean: float
    half_width_95: float
    trials: int

    @classmethod
    def from_samples(cls, x) -> "McEstimate":
        x = np.asarray(x, dtype=float)
        n = x.size
        mean = float(np.sum(x) / n)
        sd = float(np.std(x, ddof=1)) if n > 1 else 0.0
        return cls(mean, Z95 * sd / math.sqrt(n), n)

    def contains(self, value, slack=0.0) -> bool:
        return abs(value - self.mean) <= self.half_width_95 + slack


@dataclass(frozen=True)
class MacEpisode:
    rounds_used: int
    collided: tuple
    decoded: bool
    combined_snr_trace: tuple


@dataclass(frozen=True)
class ChannelDraws:
    """Per-trial sensor distance and per-round reflected power ``|H|^2``."""
    d1_sq: np.ndarray
    power: np.ndarray

    @property
    def trials(self):
        return self.d1_sq.size

    def snr(self, params: ScenarioParams):
        """Per-round received SNR for the given link budget (d2, gamma_t, ...)."""
        budget = link_budget(params, np.sqrt(self.d1_sq))
        return budget[:, None] * self.power


def block_sizes(trials: int, block=BLOCK_TRIALS):
    full, rest = divmod(trials, block)
    return [block] * full + ([rest] if rest else [])


def block_generators(seed: int, index: int, stream: int = 0):
    """Independent (channel, MAC) generators for one block."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream, index))
    chan_ss, mac_ss = ss.spawn(2)
    return np.random.default_rng(chan_ss), np.random.default_rng(mac_ss)


def _draw_block(params, rounds, model, seed, stream, job):
    index, n = job
    rng, _ = block_generators(seed, index, stream)
    geom = DiskGeometry.of(params)
    d1_sq = geom.h ** 2 + geom.R ** 2 * rng.random(n)
    power = np.empty((n, rounds))
    if model == ELEMENT:
        _kernels.reflected_power(rng, power, params.N, float(params.m), float(params.Omega),
                                 float(params.kappa))
    elif model == GAMMA_FAST:
        chan = equivalent_channel(params)
        power[:] = params.N ** 2 * rng.gamma(chan.k_hat, chan.theta, (n, rounds))
    else:
        raise ValueError(f"unknown channel model {model!r}")
    return d1_sq, power


def _map_blocks(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def draw_channel(params: ScenarioParams, trials: int, rounds: int = 1, seed: int = 0,
                 stream: int = 0, model: str = ELEMENT, workers: int = 1) -> ChannelDraws:
    """Draw sensor positions and ``rounds`` independent channel powers per trial.

    ``model="gamma"`` samples the moment-matched gamma approximation instead
    of individual elements; it is a fast path for sweeps, not an oracle.
    """
    jobs = list(enumerate(block_sizes(trials)))
    parts = _map_blocks(partial(_draw_block, params, rounds, model, seed, stream), jobs, workers)
    return ChannelDraws(np.concatenate([p[0] for p in parts]),
                        np.concatenate([p[1] for p in parts]))


# ---------------------------------------------------------------------------
# channel-only indicators

def coverage_indicator(params: ScenarioParams, draws: ChannelDraws, l: int = 1):
    """Combined SNR of the first ``l`` copies clears the threshold."""
    snr = draws.snr(params)
    return np.sum(snr[:, :l], axis=1) >= params.gamma_thr


def round_success_indicator(params: ScenarioParams, draws: ChannelDraws, l: int):
    """First ``l - 1`` copies fail, ``l`` copies succeed."""
    snr = draws.snr(params)
    acc = np.cumsum(snr[:, :l], axis=1)
    ok = acc[:, l - 1] >= params.gamma_thr
    if l > 1:
        ok &= acc[:, l - 2] < params.gamma_thr
    return ok


# ---------------------------------------------------------------------------
# MAC episodes

def collision_pattern(params: ScenarioParams, rng: np.random.Generator, trials: int):
    """``(transmits, collided)`` boolean arrays of shape ``(trials, L)``.

    Each of the ``S - 1`` interferers transmits independently with
    probability ``rho`` in every slot.
    """
    L, others = params.L_max, params.S_sensors - 1
    active = rng.random((trials, L, others)) < params.rho_access
    collided = active.any(axis=2)
    if params.tagged_access == "bernoulli":
        transmits = rng.random((trials, L)) < params.rho_access
    else:
        transmits = np.ones((trials, L), dtype=bool)
    return transmits, collided & transmits


def resolve_episodes(params: ScenarioParams, snr, transmits, collided):
    """Run truncated code combining over pre-drawn per-copy SNRs.

    ``snr[:, k]`` is consumed by the ``k``-th clean (transmitted, collision
    free) round. Returns ``(rounds_used, decoded, trace)`` where ``trace`` is
    the accumulated SNR after every slot.
    """
    n, L = transmits.shape
    clean = transmits & ~collided
    acc = np.zeros(n)
    used = np.full(n, L)
    decoded = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    n_clean = np.zeros(n, dtype=int)
    trace = np.zeros((n, L))
    rows = np.arange(n)
    for r in range(L):
        add = active & clean[:, r]
        idx = rows[add]
        acc[idx] += snr[idx, n_clean[idx]]
        n_clean[idx] += 1
        trace[:, r] = acc
        hit = add & (acc >= params.gamma_thr)
        decoded |= hit
        used[hit] = r + 1
        active &= ~hit
    return used, decoded, trace


def run_episode(params: ScenarioParams, rng: np.random.Generator) -> MacEpisode:
    """One message cycle of the tagged sensor with element-level channel draws.

    The sensor position is fixed for the episode; fading is redrawn for every
    clean round. Collided rounds store nothing at the receiver.
    """
    geom = DiskGeometry.of(params)
    d1 = math.sqrt(geom.h ** 2 + geom.R ** 2 * rng.random())
    budget = float(link_budget(params, d1))
    acc = 0.0
    collided, trace = [], []
    for r in range(1, params.L_max + 1):
        interferer = bool(np.any(rng.random(params.S_sensors - 1) < params.rho_access))
        sends = params.tagged_access == "persistent" or rng.random() < params.rho_access
        hit = sends and interferer
        collided.append(hit)
        if sends and not hit:
            acc += budget * float(sample_reflected_power(params, rng, 1)[0])
        trace.append(acc)
        if sends and not hit and acc >= params.gamma_thr:
            return MacEpisode(r, tuple(collided), True, tuple(trace))
    return MacEpisode(params.L_max, tuple(collided), False, tuple(trace))


def _episode_block(params, seed, stream, model, job):
    index, n = job
    d1_sq, power = _draw_block(params, params.L_max, model, seed, stream, job)
    _, mac_rng = block_generators(seed, index, stream)
    transmits, collided = collision_pattern(params, mac_rng, n)
    snr = ChannelDraws(d1_sq, power).snr(params)
    used, decoded, _ = resolve_episodes(params, snr, transmits, collided)
    return used, decoded


def simulate_episodes(params: ScenarioParams, trials: int, seed: int = 0, stream: int = 0,
                      model: str = ELEMENT, workers: int = 1):
    """``(rounds_used, decoded)`` arrays over ``trials`` independent episodes."""
    jobs = list(enumerate(block_sizes(trials)))
    parts = _map_blocks(partial(_episode_block, params, seed, stream, model), jobs, workers)
    return (np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def episodes_from_draws(params: ScenarioParams, draws: ChannelDraws, seed: int = 0,
                        stream: int = 0):
    """Episodes reusing existing channel draws; the MAC pattern is drawn per block."""
    used, decoded = [], []
    start = 0
    for index, n in enumerate(block_sizes(draws.trials)):
        _, mac_rng = block_generators(seed, index, stream)
        transmits, collided = collision_pattern(params, mac_rng, n)
        part = ChannelDraws(draws.d1_sq[start:start + n], draws.power[start:start + n])
        u, d, _ = resolve_episodes(params, part.snr(params), transmits, collided)
        used.append(u)
        decoded.append(d)
        start += n
    return np.concatenate(used), np.concatenate(decoded)


def ratio_estimate(num, den, scale=1.0) -> McEstimate:
    """Ratio of means with a delta-method 95% half-width."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    n = num.size
    mx, my = np.sum(num) / n, np.sum(den) / n
    r = mx / my
    cov = np.cov(num, den, ddof=1)
    var = (cov[0, 0] - 2.0 * r * cov[0, 1] + r * r * cov[1, 1]) / (my * my * n)
    return McEstimate(float(scale * r), float(scale * Z95 * math.sqrt(max(var, 0.0))), n)


def mac_estimates(params: ScenarioParams, used, decoded) -> dict:
    return {
        "t_bar": McEstimate.from_samples(used),
        "p_suc": McEstimate.from_samples(decoded),
        "r_bar": ratio_estimate(decoded, used, rate_per_success(params)),
    }


def estimate(metric: str, params: ScenarioParams, trials: int, seed: int = 0, l: int = 1,
             model: str = ELEMENT, workers: int = 1) -> McEstimate:
    """Monte-Carlo estimate of one analytic quantity.

    Coverage-type metrics use raw channel draws and ignore the MAC; ``t_bar``,
    ``p_suc`` and ``r_bar`` simulate full episodes with ``params.L_max`` rounds.
    """
    if trials < 1000:
        raise ValueError("trials must be >= 1000")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if metric in ("coverage", "coverage_cc", "round_success"):
        rounds = 1 if metric == "coverage" else l
        draws = draw_channel(params, trials, rounds, seed, model=model, workers=workers)
        if metric == "round_success":
            return McEstimate.from_samples(round_success_indicator(params, draws, l))
        return McEstimate.from_samples(coverage_indicator(params, draws, rounds))
    used, decoded = simulate_episodes(params, trials, seed, model=model, workers=workers)
    return mac_estimates(params, used, decoded)[metric]
