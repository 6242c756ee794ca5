import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavris import analytics as an
from uavris.config import UnflyableError, paper_default
from uavris.energy import (MIN_FIT_WEIGHT, data_per_flight, data_per_flight_closed_form,
                           energy_breakdown, thrust_power, weight_budget)


def test_bare_uav():
    e = energy_breakdown(paper_default(), N=0)
    assert e.W == pytest.approx(4.6)
    assert e.P_thr == pytest.approx(459.04)
    assert e.lifetime_min == pytest.approx(180 / 460.04 * 60)


def test_hover_with_fifty_elements():
    e = energy_breakdown(paper_default(N=50))
    assert e.W == pytest.approx(4.983, abs=1e-3)
    assert e.P_total == pytest.approx(507.7, abs=0.1)
    assert e.lifetime_min == pytest.approx(21.3, abs=0.1)


def test_medium_speed():
    e = energy_breakdown(paper_default(N=400, speed_kmh=20))
    assert e.S_w == pytest.approx((17 - 3.25 - 3.064) * 20 / 62)
    assert e.S_w == pytest.approx(3.447, abs=1e-3)
    assert e.lifetime_min == pytest.approx(7.6, abs=0.1)


@given(st.integers(min_value=1, max_value=1500), st.floats(min_value=0, max_value=62))
def test_breakdown_invariants(N, speed):
    try:
        p = paper_default(N=N, speed_kmh=speed)
    except UnflyableError:
        return
    e = energy_breakdown(p)
    assert min(e.R_w, e.S_w, e.D_w, e.A_ris) >= 0
    assert e.W == pytest.approx(p.U_w + p.B_w + e.R_w + e.S_w + e.D_w)
    assert e.P_total == pytest.approx(e.P_thr + p.P_txrx_w + p.P_circ_w)
    assert e.L_t == pytest.approx(p.B_c_wh / e.P_total)
    assert e.W < p.T_max_kg


def test_drag_negligible_at_zero_angle():
    _, _, D_w, _ = weight_budget(paper_default(N=800))
    assert 0 < D_w < 1e-3


def test_unflyable_weight():
    with pytest.raises(UnflyableError):
        energy_breakdown(paper_default(N=100, speed_kmh=60, T_max_kg=5.0))


def test_thrust_fit_root():
    assert thrust_power(MIN_FIT_WEIGHT) == pytest.approx(0.0, abs=1e-12)
    assert MIN_FIT_WEIGHT == pytest.approx(0.2438, abs=1e-4)


def test_thrust_increasing_convex():
    W = np.linspace(2.64, 17, 500)
    P = thrust_power(W)
    assert np.all(np.diff(P) > 0)
    assert np.all(np.diff(P, 2) > 0)


def test_lifetime_decreasing():
    for speed in (0, 10, 20, 40):
        lt = [energy_breakdown(paper_default(N=N, speed_kmh=speed)).L_t for N in range(50, 401, 10)]
        assert np.all(np.diff(lt) < 0)
    for N in (50, 200, 400):
        lt = [energy_breakdown(paper_default(N=N, speed_kmh=s)).L_t for s in range(0, 46, 5)]
        assert np.all(np.diff(lt) < 0)


def test_lifetime_slope_flattens_with_speed():
    for N in range(50, 400, 25):
        def slope(speed):
            a = energy_breakdown(paper_default(N=N, speed_kmh=speed)).L_t
            b = energy_breakdown(paper_default(N=N + 1, speed_kmh=speed)).L_t
            return abs(b - a)
        assert slope(20) < slope(0)


def test_data_per_flight_zero_success():
    p = paper_default()
    assert data_per_flight(p, an.MacAnalytics(1.0, 0.0, 0.0), energy_breakdown(p)) == 0.0


@pytest.mark.parametrize("N, d2, L", [(300, 200, 1), (500, 250, 3), (700, 300, 2)])
def test_data_per_flight_identity(N, d2, L):
    p = paper_default(N=N, d2=d2, L_max=L)
    mac = an.mac_analytics(p)
    e = energy_breakdown(p)
    value = data_per_flight(p, mac, e)
    assert value == pytest.approx(mac.r_bar * e.L_t * 3600, rel=1e-9)
    assert value == pytest.approx(data_per_flight_closed_form(p, mac.p_suc, mac.t_bar), rel=1e-9)


@pytest.mark.parametrize("d2", [200, 250, 300])
def test_interior_maximizer(d2):
    Ns = np.arange(200, 801, 10)
    d = [data_per_flight(p, an.mac_analytics(p), energy_breakdown(p))
         for p in (paper_default(N=int(N), d2=d2) for N in Ns)]
    k = int(np.argmax(d))
    assert 0 < k < len(Ns) - 1
