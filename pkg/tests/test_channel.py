import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from uavris import _kernels
from uavris.channel import (DiskGeometry, ModelValidityError, combined_snr, d1_cdf,
                            d1_from_uniform, equivalent_channel, link_budget, nakagami_mean_ratio,
                            normalized_threshold, round_half_up, sample_combined_gain,
                            sample_element_gain, sample_phase_error, sample_sensor_distance)
from uavris.config import paper_default
from uavris.mac_sim import draw_channel

mp.mp.dps = 50


def _reference_channel(m, Omega, kappa, N):
    m, Omega, kappa = mp.mpf(m), mp.mpf(Omega), mp.mpf(kappa)
    i0, i1, i2 = (mp.besseli(p, kappa) for p in range(3))
    om = (i1 * mp.gamma(m + mp.mpf(1) / 2) * mp.sqrt(Omega) / (i0 * mp.gamma(m) * mp.sqrt(m))) ** 2
    mt = N * om * i0 / (2 * i0 + 2 * i2 - 4 * om * i0)
    return float(om), float(mt)


def test_equivalent_channel_defaults():
    chan = equivalent_channel(paper_default(N=400))
    om, mt = _reference_channel(3, 1, 1, 400)
    assert chan.omega_tilde == pytest.approx(om, rel=1e-13)
    assert chan.m_tilde == pytest.approx(mt, rel=1e-13)
    assert chan.omega_tilde == pytest.approx(0.1834005, abs=1e-6)
    assert chan.m_tilde == pytest.approx(49.5398, abs=1e-3)
    assert chan.k_hat == 50
    assert chan.theta == pytest.approx(0.0037021, abs=1e-7)


def test_normalized_threshold_value():
    assert equivalent_channel(paper_default(N=400, d2=200)).w == pytest.approx(7.9057e-5, rel=1e-4)


def test_threshold_includes_element_gain():
    base = normalized_threshold(paper_default())
    assert normalized_threshold(paper_default(G_db=3)) == pytest.approx(base / 10 ** 0.3, rel=1e-12)


def test_strong_concentration_limit():
    chan = equivalent_channel(paper_default(kappa=1e6))
    assert chan.omega_tilde == pytest.approx(nakagami_mean_ratio(3) ** 2, rel=2e-6)


def test_model_validity_error():
    # near-perfect alignment with a large spread leaves no variance to match
    with pytest.raises(ModelValidityError):
        equivalent_channel(paper_default(kappa=1e6, Omega=2.0))


@given(st.floats(min_value=0.5, max_value=500.0))
def test_round_half_up(x):
    k = round_half_up(x)
    assert k - 0.5 <= x < k + 0.5


def test_round_half_up_ties():
    assert round_half_up(49.5) == 50 and round_half_up(2.5) == 3


@given(st.floats(min_value=0.5, max_value=10), st.floats(min_value=1, max_value=5),
       st.integers(min_value=1, max_value=1500))
def test_equivalent_channel_invariants(kappa, m, N):
    chan = equivalent_channel(paper_default(kappa=kappa, m=m, N=N))
    assert chan.m_tilde > 0 and 0 < chan.omega_tilde <= 1.0
    assert chan.k_hat >= 1 and chan.theta > 0 and chan.w > 0
    assert chan.theta == pytest.approx(chan.omega_tilde / chan.m_tilde)


@given(st.floats(min_value=1e-3, max_value=1e3))
def test_threshold_scale_invariance(c):
    p = paper_default()
    scaled = p.replace(gamma_t_db=p.gamma_t_db + 10 * math.log10(c),
                       gamma_thr_db=p.gamma_thr_db + 10 * math.log10(c))
    assert normalized_threshold(scaled) == pytest.approx(normalized_threshold(p), rel=1e-12)


def test_d1_cdf_edges():
    geom = DiskGeometry(50, 20)
    assert d1_cdf(geom, 50) == (0.0, True)
    assert d1_cdf(geom, math.sqrt(2900))[0] == pytest.approx(1.0, abs=1e-15)
    assert d1_cdf(geom, math.sqrt(2700))[0] == pytest.approx(0.5, abs=1e-15)
    assert d1_cdf(geom, 10) == (0.0, False)
    assert d1_cdf(geom, 100) == (1.0, False)


def test_d1_from_uniform_edges():
    geom = DiskGeometry(50, 20)
    assert d1_from_uniform(geom, 0.0) == 50
    assert d1_from_uniform(geom, 1.0) == pytest.approx(math.sqrt(2900))


def test_sensor_distance_ks():
    geom = DiskGeometry(50, 20)
    d1 = sample_sensor_distance(geom, np.random.default_rng(1), 10 ** 6)
    ks = stats.kstest(d1, lambda x: d1_cdf(geom, x)[0]).statistic
    assert ks < 0.002


def test_sensor_distance_squared_uniform_chi2():
    geom = DiskGeometry(50, 20)
    d1 = sample_sensor_distance(geom, np.random.default_rng(2), 10 ** 5)
    counts, _ = np.histogram(d1 ** 2, bins=50, range=(2500, 2900))
    assert stats.chisquare(counts).pvalue > 0.01


def _within(samples, expected, sigmas):
    n = samples.size
    return abs(samples.mean() - expected) <= sigmas * samples.std(ddof=1) / math.sqrt(n)


def test_element_gain_moments():
    rng = np.random.default_rng(3)
    a = sample_element_gain(3.0, 1.0, rng, 10 ** 6)
    assert _within(a ** 2, 1.0, 3)
    assert _within(a, 0.9593688, 3)
    assert nakagami_mean_ratio(3) == pytest.approx(0.9593688, abs=1e-7)
    assert np.var(a ** 2) == pytest.approx(1.0 / 3.0, rel=0.01)


def test_phase_error_uniform():
    phi = sample_phase_error(0.0, np.random.default_rng(4), 10 ** 6)
    assert phi.min() >= -math.pi and phi.max() <= math.pi
    assert _within(np.cos(phi), 0.0, 3)


@pytest.mark.parametrize("order, expected", [(1, 0.4463900), (2, 0.1072199)])
def test_phase_error_circular_moments(order, expected):
    phi = sample_phase_error(1.0, np.random.default_rng(5), 10 ** 6)
    assert _within(np.cos(order * phi), expected, 3)


@pytest.mark.parametrize("order, expected", [(1, 0.4463900), (2, 0.1072199)])
def test_compiled_phase_sampler_moments(order, expected):
    cs = _kernels.vonmises_cos_sin(np.random.default_rng(6), 1.0, 10 ** 6)
    c = cs[:, 0] if order == 1 else cs[:, 0] ** 2 - cs[:, 1] ** 2
    assert _within(c, expected, 3)


def test_degenerate_snr_is_deterministic():
    p = paper_default(N=400)
    d1 = 52.0
    a = np.full(p.N, math.sqrt(p.Omega))
    snr = combined_snr(p, d1, a, np.zeros(p.N))
    expected = p.gamma_t * p.C0 * p.G * p.N ** 2 * p.Omega * (p.d0 / (d1 * p.d2)) ** 2
    assert snr == pytest.approx(expected, rel=1e-12)


def test_single_element_gain_is_scaled_gamma():
    p = paper_default(N=1)
    snr = sample_combined_gain(p, 50.0, np.random.default_rng(7), 10 ** 6)
    scale = float(link_budget(p, 50.0))
    assert _within(snr / scale, p.Omega, 3)
    ks = stats.kstest(snr / scale, stats.gamma(p.m, scale=p.Omega / p.m).cdf).statistic
    assert ks < 0.002


def test_scalar_combined_gain():
    assert isinstance(sample_combined_gain(paper_default(N=4), 50.0, np.random.default_rng(0)), float)


def test_array_gain_mean_close_to_approximation():
    p = paper_default(N=400)
    chan = equivalent_channel(p)
    power = draw_channel(p, 10 ** 6, seed=8).power[:, 0] / p.N ** 2
    assert power.mean() == pytest.approx(chan.k_hat * chan.theta, rel=0.02)
    # exact mean of |H|^2 / N^2 includes the 1/N self term
    assert _within(power, chan.omega_tilde + (p.Omega - chan.omega_tilde) / p.N, 3)


def test_compiled_and_numpy_paths_agree():
    p = paper_default(N=100)
    fast = draw_channel(p, 20000, seed=9).power[:, 0]
    slow = np.random.default_rng(10)
    ref = np.concatenate([np.atleast_1d(sample_combined_gain(p, 1.0, slow, 2000))
                          for _ in range(10)]) / float(link_budget(p, 1.0))
    assert stats.ks_2samp(fast, ref).pvalue > 0.001


KS_GRID = [(kappa, m, N) for kappa in (0.5, 1.0, 2.0, 5.0, 10.0) for m in (1.0, 3.0, 5.0)
           for N in (100, 400)]


@pytest.mark.slow
def test_gamma_approximation_ks_over_fading_grid():
    """KS distance between simulated |H|/N and the moment-matched Nakagami law."""
    failures = []
    for i, (kappa, m, N) in enumerate(KS_GRID):
        p = paper_default(kappa=kappa, m=m, N=N)
        chan = equivalent_channel(p)
        x = draw_channel(p, 10 ** 5, seed=100 + i).power[:, 0] / N ** 2
        ks = stats.kstest(x, stats.gamma(chan.m_tilde, scale=chan.theta).cdf).statistic
        if ks >= 0.03:
            failures.append(f"kappa={kappa} m={m} N={N}: KS={ks:.3f}")
    assert not failures, "; ".join(failures)
