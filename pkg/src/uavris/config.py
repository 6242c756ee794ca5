"""Scenario parameters for the UAV-mounted RIS data-collection model.

Every physical, geometric, MAC and energy input lives in one frozen
``ScenarioParams`` record. Decibel quantities are stored as given and
converted to linear scale on demand.
"""

from __future__ import annotations

import dataclasses
import math
import numbers
from dataclasses import dataclass, fields
from pathlib import Path


class ScenarioError(ValueError):
    """Raised for missing keys, unknown keys or invariant violations."""


class UnflyableError(ScenarioError):
    """Raised when the total lifted weight reaches the maximum thrust."""


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


TAGGED_ACCESS_MODES = ("persistent", "bernoulli")


@dataclass(frozen=True)
class ScenarioParams:
    # geometry (m)
    h: float
    R: float
    d2: float
    d0: float
    # radio
    gamma_t_db: float
    gamma_thr_db: float
    C0_db: float
    G_db: float
    N: int
    bandwidth_hz: float
    wavelength_m: float
    # fading
    m: float
    Omega: float
    kappa: float
    # MAC
    S_sensors: int
    rho_access: float
    L_max: int
    # energy (kg, Wh, km/h, SI otherwise)
    U_w: float
    B_w: float
    E_w: float
    B_c_wh: float
    T_max_kg: float
    speed_kmh: float
    S_max_kmh: float
    air_density: float
    v_air: float
    C_d: float
    g: float
    P_txrx_w: float
    P_circ_w: float
    tagged_access: str = "persistent"

    def __post_init__(self):
        for name in ("N", "S_sensors", "L_max"):
            value = getattr(self, name)
            if isinstance(value, bool):
                raise ScenarioError(f"{name} must be an integer, got {value!r}")
            if isinstance(value, numbers.Integral) or (
                    isinstance(value, numbers.Real) and float(value).is_integer()):
                object.__setattr__(self, name, int(value))
            else:
                raise ScenarioError(f"{name} must be an integer, got {value!r}")
        self._validate()

    def _validate(self):
        checks = [
            ("h > 0", self.h > 0),
            ("R > 0", self.R > 0),
            ("d2 > 0", self.d2 > 0),
            ("d0 > 0", self.d0 > 0),
            ("N >= 1", self.N >= 1),
            ("m >= 0.5", self.m >= 0.5),
            ("Omega > 0", self.Omega > 0),
            ("kappa >= 0", self.kappa >= 0),
            ("0 <= rho_access <= 1", 0.0 <= self.rho_access <= 1.0),
            ("S_sensors >= 1", self.S_sensors >= 1),
            ("L_max >= 1", self.L_max >= 1),
            ("bandwidth_hz > 0", self.bandwidth_hz > 0),
            ("wavelength_m > 0", self.wavelength_m > 0),
            ("speed_kmh >= 0", self.speed_kmh >= 0),
            ("S_max_kmh > 0", self.S_max_kmh > 0),
            ("speed_kmh <= S_max_kmh", self.speed_kmh <= self.S_max_kmh),
            ("U_w >= 0", self.U_w >= 0),
            ("B_w >= 0", self.B_w >= 0),
            ("E_w >= 0", self.E_w >= 0),
            ("B_c_wh > 0", self.B_c_wh > 0),
            ("T_max_kg > 0", self.T_max_kg > 0),
            ("air_density >= 0", self.air_density >= 0),
            ("C_d >= 0", self.C_d >= 0),
            ("g > 0", self.g > 0),
            ("P_txrx_w >= 0", self.P_txrx_w >= 0),
            ("P_circ_w >= 0", self.P_circ_w >= 0),
            ("tagged_access in " + "|".join(TAGGED_ACCESS_MODES),
             self.tagged_access in TAGGED_ACCESS_MODES),
        ]
        failed = [pred for pred, ok in checks if not ok]
        if failed:
            raise ScenarioError("invalid scenario: " + "; ".join(failed))
        # local import: energy depends on this module
        from .energy import weight_budget

        weight_budget(self)

    # linear views of the dB fields
    @property
    def gamma_t(self):
        return db_to_linear(self.gamma_t_db)

    @property
    def gamma_thr(self):
        return db_to_linear(self.gamma_thr_db)

    @property
    def C0(self):
        return db_to_linear(self.C0_db)

    @property
    def G(self):
        return db_to_linear(self.G_db)

    def replace(self, **changes) -> "ScenarioParams":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)!r}\n".replace("'", "")
                       for f in fields(self))


FIELD_TYPES = {f.name: f.type for f in fields(ScenarioParams)}
REQUIRED_KEYS = tuple(f.name for f in fields(ScenarioParams)
                      if f.default is dataclasses.MISSING)

PRESETS = {
    "paper-default": dict(
        h=50.0, R=20.0, d2=250.0, d0=1.0,
        gamma_t_db=95.0, gamma_thr_db=0.0, C0_db=-60.0, G_db=0.0,
        N=400, bandwidth_hz=125e3, wavelength_m=0.125,
        m=3.0, Omega=1.0, kappa=1.0,
        S_sensors=10, rho_access=0.1, L_max=1,
        U_w=3.25, B_w=1.35, E_w=7.66e-3, B_c_wh=180.0, T_max_kg=17.0,
        speed_kmh=0.0, S_max_kmh=62.0, air_density=1.225, v_air=2.5,
        C_d=0.005, g=9.8, P_txrx_w=1.0, P_circ_w=0.0,
        tagged_access="persistent",
    ),
}


def _coerce(key, raw):
    kind = FIELD_TYPES[key]
    try:
        if kind == "int":
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        if kind == "str":
            return raw
        return float(raw)
    except ValueError:
        raise ScenarioError(f"{key}: cannot parse {raw!r} as {kind}") from None


def parse_scenario_text(text: str) -> dict:
    """Parse ``key = value`` lines into a dict, resolving a ``preset`` line.

    Later keys override the preset. Blank lines and ``#`` comments are ignored.
    """
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key == "preset":
            if raw not in PRESETS:
                raise ScenarioError(f"unknown preset {raw!r}")
            values.update(PRESETS[raw])
            continue
        if key not in FIELD_TYPES:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def load_scenario(source=None, *, preset: str | None = None, **overrides) -> ScenarioParams:
    """Build a validated scenario.

    Args:
        source: a path to a ``key = value`` file, or the document text itself.
        preset: name of a built-in preset applied before ``source``.
        **overrides: field values applied last.

    Raises:
        ScenarioError: on a missing or unknown key, or a violated invariant.
    """
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ScenarioError(f"unknown preset {preset!r}")
        values.update(PRESETS[preset])
    if source is not None:
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                        and "=" not in source):
            source = Path(source).read_text()
        values.update(parse_scenario_text(source))
    for key in overrides:
        if key not in FIELD_TYPES:
            raise ScenarioError(f"unknown key {key!r}")
    values.update(overrides)
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ScenarioError("missing required field(s): " + ", ".join(missing))
    return ScenarioParams(**values)


def paper_default(**overrides) -> ScenarioParams:
    return load_scenario(preset="paper-default", **overrides)
