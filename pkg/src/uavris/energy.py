"""UAV weight budget, thrust power, flight lifetime and data per flight."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ScenarioParams, UnflyableError

# quadratic thrust-power fit, W in kg -> watts
THRUST_COEFFS = (4.0, 86.0, -21.2)
# positive root of the fit; below it the fit predicts negative power
MIN_FIT_WEIGHT = (-THRUST_COEFFS[1] + math.sqrt(THRUST_COEFFS[1] ** 2
                  - 4 * THRUST_COEFFS[0] * THRUST_COEFFS[2])) / (2 * THRUST_COEFFS[0])


@dataclass(frozen=True)
class EnergyBreakdown:
    R_w: float
    S_w: float
    D_w: float
    W: float
    A_ris: float
    P_thr: float
    P_total: float
    L_t: float  # hours

    @property
    def lifetime_s(self):
        return self.L_t * 3600.0

    @property
    def lifetime_min(self):
        return self.L_t * 60.0


def thrust_power(W):
    a, b, c = THRUST_COEFFS
    return a * W * W + b * W + c


def ris_area(params: ScenarioParams, N=None):
    N = params.N if N is None else N
    return N * params.wavelength_m ** 2 / 100.0


def weight_budget(params: ScenarioParams, N=None):
    """Return ``(R_w, S_w, D_w, W)`` in kg.

    ``N`` overrides the element count, e.g. ``N=0`` for the bare UAV.

    Raises:
        UnflyableError: if the speed margin is negative, ``W >= T_max`` or
            ``W`` falls below the range where the thrust fit is positive.
    """
    N = params.N if N is None else N
    R_w = N * params.E_w
    margin = params.T_max_kg - params.U_w - R_w
    if margin < 0:
        raise UnflyableError(
            f"RIS weight {R_w:.4g} kg exceeds thrust margin T_max - U_w = "
            f"{params.T_max_kg - params.U_w:.4g} kg")
    S_w = margin * params.speed_kmh / params.S_max_kmh
    D_w = params.air_density * params.v_air ** 2 * params.C_d * ris_area(params, N) / (2.0 * params.g)
    W = params.U_w + params.B_w + R_w + S_w + D_w
    if W >= params.T_max_kg:
        raise UnflyableError(f"total weight W={W:.4g} kg >= T_max={params.T_max_kg} kg")
    if W <= MIN_FIT_WEIGHT:
        raise UnflyableError(f"total weight W={W:.4g} kg outside the thrust fit (<= {MIN_FIT_WEIGHT:.4g})")
    return R_w, S_w, D_w, W


def energy_breakdown(params: ScenarioParams, N=None) -> EnergyBreakdown:
    R_w, S_w, D_w, W = weight_budget(params, N)
    P_thr = thrust_power(W)
    P_total = P_thr + params.P_txrx_w + params.P_circ_w
    return EnergyBreakdown(
        R_w=R_w, S_w=S_w, D_w=D_w, W=W, A_ris=ris_area(params, N),
        P_thr=P_thr, P_total=P_total, L_t=params.B_c_wh / P_total,
    )


def data_per_flight(params: ScenarioParams, mac, energy: EnergyBreakdown) -> float:
    """Average bits collected per flight: mean throughput times lifetime in seconds."""
    return mac.r_bar * energy.lifetime_s


def data_per_flight_closed_form(params: ScenarioParams, p_suc, t_bar) -> float:
    """Single-expression form of :func:`data_per_flight` (battery Wh to J)."""
    _, _, _, W = weight_budget(params)
    rate = params.bandwidth_hz * math.log2(1.0 + params.gamma_thr)
    power = thrust_power(W) + params.P_txrx_w + params.P_circ_w
    return params.B_c_wh * 3600.0 * rate * p_suc / (t_bar * power)
