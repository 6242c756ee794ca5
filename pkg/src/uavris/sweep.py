"""Parameter sweeps, RIS-size search and analytic-vs-simulation adjudication."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import analytics as an
from .channel import equivalent_channel
from .config import ScenarioError, ScenarioParams, UnflyableError
from .energy import data_per_flight, energy_breakdown
from .mac_sim import (ChannelDraws, McEstimate, coverage_indicator, draw_channel,
                      episodes_from_draws, mac_estimates, round_success_indicator)

# grid axis name -> ScenarioParams field
AXES = {"N": "N", "d2": "d2", "R": "R", "L": "L_max", "speed": "speed_kmh"}
METRICS = ("p_c", "p_cc", "t_bar", "p_suc", "r_bar", "l_t", "d_bar_f")
MC_METRICS = ("p_c", "p_cc", "t_bar", "p_suc", "r_bar")
FLOAT_FMT = ".9g"


class UsageError(ValueError):
    pass


@dataclass
class SweepRecord:
    N: int
    d2: float
    R: float
    L: int
    speed: float
    p_c: float | None = None
    p_cc: float | None = None
    t_bar: float | None = None
    p_suc: float | None = None
    r_bar: float | None = None
    l_t: float | None = None
    d_bar_f: float | None = None
    ps_method: str = ""
    error: str = ""
    mc: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# grid parsing

def _parse_values(axis, text):
    text = text.strip()
    try:
        if "|" in text:
            values = [float(v) for v in text.split("|")]
        elif ":" in text:
            parts = [float(v) for v in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            start, stop, step = parts
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(count)]
        else:
            values = [float(text)]
    except ValueError:
        raise UsageError(f"bad grid values for {axis!r}: {text!r}") from None
    if not values:
        raise UsageError(f"empty grid for axis {axis!r}")
    if axis in ("N", "L"):
        if any(not float(v).is_integer() for v in values):
            raise UsageError(f"axis {axis} takes integers")
        return [int(v) for v in values]
    return values


def parse_grid(spec) -> dict:
    """``"N=200:800:10,d2=200|250|300"`` -> ``{"N": [...], "d2": [...]}``.

    ``start:stop:step`` includes ``stop`` when it lies on the step.
    """
    if isinstance(spec, dict):
        return {k: list(v) for k, v in spec.items()}
    grid = {}
    for item in filter(None, (s.strip() for s in spec.split(","))):
        if "=" not in item:
            raise UsageError(f"grid entry {item!r} is not axis=values")
        axis, values = item.split("=", 1)
        axis = axis.strip()
        if axis not in AXES:
            raise UsageError(f"unknown grid axis {axis!r}; expected one of {tuple(AXES)}")
        grid[axis] = _parse_values(axis, values)
    return grid


def grid_points(scenario: ScenarioParams, grid: dict):
    """Full axis tuples in lexicographic order over ``AXES``; missing axes use the scenario."""
    lists = []
    for axis, fname in AXES.items():
        lists.append(grid.get(axis, [getattr(scenario, fname)]))
    if any(len(v) == 0 for v in lists):
        raise UsageError("grid is empty")
    return [dict(zip(AXES, combo)) for combo in itertools.product(*lists)]


# ---------------------------------------------------------------------------
# point evaluation

def _analytic(params, metrics, method, combinatorial):
    chan = equivalent_channel(params)
    out = {}
    if "p_c" in metrics:
        out["p_c"] = an.coverage(params, chan).value
    if "p_cc" in metrics:
        out["p_cc"] = an.coverage_cc(params, chan, params.L_max).value
    needs_mac = {"t_bar", "p_suc", "r_bar", "d_bar_f"} & set(metrics)
    if needs_mac:
        mac = an.mac_analytics(params, chan, method, combinatorial)
        out.update(t_bar=mac.t_bar, p_suc=mac.p_suc, r_bar=mac.r_bar)
    if {"l_t", "d_bar_f"} & set(metrics):
        energy = energy_breakdown(params)
        out["l_t"] = energy.L_t
        if "d_bar_f" in metrics:
            out["d_bar_f"] = data_per_flight(params, mac, energy)
    return {k: v for k, v in out.items() if k in metrics}


def _mc(params, draws, metrics, seed, stream):
    out = {}
    if "p_c" in metrics:
        out["p_c"] = McEstimate.from_samples(coverage_indicator(params, draws, 1))
    if "p_cc" in metrics:
        out["p_cc"] = McEstimate.from_samples(coverage_indicator(params, draws, params.L_max))
    if {"t_bar", "p_suc", "r_bar"} & set(metrics):
        used, decoded = episodes_from_draws(params, draws, seed, stream)
        out.update({k: v for k, v in mac_estimates(params, used, decoded).items()
                    if k in metrics})
    return out


def _record(point, scenario):
    return SweepRecord(N=point["N"], d2=point["d2"], R=point["R"], L=point["L"],
                       speed=point["speed"])


def _channel_key(point):
    return (point["N"], point["R"])


def _evaluate_group(scenario, metrics, mc_metrics, trials, seed, method, combinatorial,
                    max_rounds, job):
    """Evaluate points sharing ``(N, R)``; they reuse one set of channel draws."""
    stream, points = job
    draws = None
    records = []
    for point in points:
        rec = _record(point, scenario)
        rec.ps_method = method if {"t_bar", "p_suc", "r_bar", "d_bar_f"} & set(metrics) else ""
        try:
            params = scenario.replace(**{AXES[a]: v for a, v in point.items()})
            for k, v in _analytic(params, metrics, method, combinatorial).items():
                setattr(rec, k, v)
            if trials > 0 and mc_metrics:
                if draws is None:
                    draws = draw_channel(params, trials, max_rounds, seed, stream)
                rec.mc = _mc(params, draws, mc_metrics, seed, stream)
        except UnflyableError as exc:
            rec.error = f"unflyable: {exc}"
        except (ScenarioError, ArithmeticError) as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        records.append(rec)
    return records


def run_sweep(scenario: ScenarioParams, grid, metrics, trials: int = 0, seed: int = 0,
              mc_metrics=None, method: str = an.NUMERIC, combinatorial: bool = False,
              workers: int = 1):
    """Evaluate ``metrics`` at every grid point, in lexicographic grid order.

    Monte-Carlo columns are produced only when ``trials > 0``, for
    ``mc_metrics`` (default: every requested metric that has a simulator).
    Unflyable points are kept with the ``error`` field set.
    """
    metrics = list(metrics or [])
    if not metrics:
        raise UsageError("no metrics requested")
    unknown = [m for m in metrics if m not in METRICS]
    if unknown:
        raise UsageError(f"unknown metric(s) {unknown}; expected from {METRICS}")
    if mc_metrics is None:
        mc_metrics = [m for m in metrics if m in MC_METRICS]
    bad = [m for m in mc_metrics if m not in MC_METRICS]
    if bad:
        raise UsageError(f"no simulator for metric(s) {bad}")
    if trials and trials < 1000:
        raise UsageError("trials must be 0 or >= 1000")
    points = grid_points(scenario, parse_grid(grid))
    max_rounds = max(p["L"] for p in points)

    groups: dict = {}
    for idx, point in enumerate(points):
        groups.setdefault(_channel_key(point), []).append((idx, point))
    jobs = [(stream, [p for _, p in members]) for stream, members in enumerate(groups.values())]
    fn = partial(_evaluate_group, scenario, metrics, mc_metrics, trials, seed, method,
                 combinatorial, max_rounds)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, jobs))
    else:
        results = [fn(job) for job in jobs]

    ordered = [None] * len(points)
    for members, recs in zip(groups.values(), results):
        for (idx, _), rec in zip(members, recs):
            ordered[idx] = rec
    yield from ordered


# ---------------------------------------------------------------------------
# CSV

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if float(v).is_integer() and abs(v) < 1e15:
            return str(int(v))
        return format(float(v), FLOAT_FMT)
    return str(v)


def csv_columns(metrics, mc_metrics=()):
    cols = list(AXES) + [m for m in METRICS if m in metrics]
    for m in METRICS:
        if m in mc_metrics:
            cols += [f"{m}_mc", f"{m}_mc_hw95", f"{m}_mc_trials"]
    return cols + ["ps_method", "error"]


def _cell(rec, col):
    for suffix, attr in (("_mc_hw95", "half_width_95"), ("_mc_trials", "trials"), ("_mc", "mean")):
        if col.endswith(suffix):
            est = rec.mc.get(col[: -len(suffix)])
            return "" if est is None else _fmt(getattr(est, attr))
    return _fmt(getattr(rec, col))


def write_csv(records, metrics, mc_metrics=(), stream=None) -> str:
    """Write records as CSV (to ``stream`` if given) and return the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = csv_columns(metrics, mc_metrics)
    writer.writerow(cols)
    for rec in records:
        writer.writerow([_cell(rec, col) for col in cols])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


# ---------------------------------------------------------------------------
# figure presets

@dataclass(frozen=True)
class FigurePreset:
    name: str
    description: str
    grid: str
    metrics: tuple
    trials: int = 0


FIGURES = {
    "fig2": FigurePreset("fig2", "coverage vs N for d2 in {200, 250, 300} m",
                         "N=200:800:10,d2=200|250|300", ("p_c",), 100_000),
    "fig3": FigurePreset("fig3", "coverage with code combining vs d2, N=400, L in {1, 2, 3}",
                         "N=400,d2=100:400:10,L=1|2|3", ("p_cc",), 100_000),
    "fig4": FigurePreset("fig4", "average throughput vs N, d2=250 m, L in {1, 2, 3}",
                         "N=50:800:10,d2=250,L=1|2|3", ("t_bar", "p_suc", "r_bar"), 100_000),
    "fig4b": FigurePreset("fig4b", "UAV lifetime vs N at 0, 10, 20 km/h",
                          "N=50:400:10,speed=0|10|20", ("l_t",)),
    "fig5": FigurePreset("fig5", "data per flight vs N for d2 in {200, 250, 300} m, L=1",
                         "N=200:800:10,d2=200|250|300,L=1", ("r_bar", "l_t", "d_bar_f")),
    "fig6": FigurePreset("fig6", "data per flight vs N at d2=200 m, R in {20, 60}, L in {1, 3}",
                         "N=200:800:10,d2=200,R=20|60,L=1|3", ("r_bar", "l_t", "d_bar_f")),
}


# ---------------------------------------------------------------------------
# RIS size search

@dataclass(frozen=True)
class OptimizeResult:
    n_star: int
    value: float
    curve: tuple  # ((N, value or nan), ...)


OBJECTIVES = ("d_bar_f", "r_bar")
TIE_REL_TOL = 1e-9
SATURATION_TOL = 1e-12


def max_elements(scenario: ScenarioParams) -> int:
    """Largest N whose RIS weight stays below ``T_max - U_w - B_w``."""
    bound = (scenario.T_max_kg - scenario.U_w - scenario.B_w) / scenario.E_w
    n = math.ceil(bound) - 1
    return max(n, 0)


def optimize_n(scenario: ScenarioParams, n_range=None, objective: str = "d_bar_f",
               method: str = an.NUMERIC, combinatorial: bool = False) -> OptimizeResult:
    """Exhaustive integer scan for the RIS size maximizing ``objective``.

    The scan stops early once the single-copy coverage reaches 1: from there
    on throughput is flat and data per flight strictly decreases. Values
    within a relative ``1e-9`` of the maximum are ties, resolved toward the
    smaller (lighter) RIS.
    """
    if objective not in OBJECTIVES:
        raise UsageError(f"objective must be one of {OBJECTIVES}")
    hi_bound = max_elements(scenario)
    lo, hi = (1, hi_bound) if n_range is None else (int(n_range[0]), int(n_range[-1]))
    if lo < 1 or hi > hi_bound or lo > hi:
        raise UsageError(f"n-range must lie within [1, {hi_bound}]")
    curve = []
    for n in range(lo, hi + 1):
        try:
            params = scenario.replace(N=n)
            chan = equivalent_channel(params)
            mac = an.mac_analytics(params, chan, method, combinatorial)
            value = mac.r_bar
            if objective == "d_bar_f":
                value = data_per_flight(params, mac, energy_breakdown(params))
        except (UnflyableError, ArithmeticError):
            curve.append((n, math.nan))
            continue
        curve.append((n, value))
        if an.coverage(params, chan).value >= 1.0 - SATURATION_TOL:
            break
    finite = [(n, v) for n, v in curve if not math.isnan(v)]
    if not finite:
        raise UnflyableError("every point of the n-range is unflyable")
    best = max(v for _, v in finite)
    n_star, value = next((n, v) for n, v in finite if v >= best * (1.0 - TIE_REL_TOL))
    return OptimizeResult(n_star, value, tuple(curve))


# ---------------------------------------------------------------------------
# adjudication report

STANDARD_GRID = {"N": [300, 400, 500], "d2": [200.0, 250.0, 300.0]}
REPORT_COLUMNS = ("quantity", "N", "d2", "l", "method", "value", "reference",
                  "reference_value", "abs_dev", "mc_hw95", "mc_trials", "within_hw")


def validate(scenario: ScenarioParams, grid=None, L: int = 3, trials: int = 1_000_000,
             seed: int = 0):
    """Compare closed forms with each other and with the simulator.

    Yields report rows (dicts keyed by ``REPORT_COLUMNS``). Channel draws
    are shared by every ``d2`` at a given ``N``.
    """
    grid = parse_grid(grid) if grid is not None else STANDARD_GRID
    for stream, N in enumerate(grid.get("N", [scenario.N])):
        base = scenario.replace(N=N, L_max=L)
        draws = draw_channel(base, trials, L, seed, stream)
        for d2 in grid.get("d2", [scenario.d2]):
            params = base.replace(d2=d2)
            chan = equivalent_channel(params)
            ps = {m: [an.round_success(params, chan, l, m).value for l in range(1, L + 1)]
                  for m in an.METHODS}
            pc = [an.coverage_cc(params, chan, l).value for l in range(1, L + 1)]
            for l in range(1, L + 1):
                est = McEstimate.from_samples(round_success_indicator(params, draws, l))
                ref = ps[an.NUMERIC][l - 1]
                for m in (an.PAPER, an.CONSISTENT):
                    yield _row("p_s", N, d2, l, m, ps[m][l - 1], an.NUMERIC, ref)
                for m in an.METHODS:
                    yield _row("p_s", N, d2, l, m, ps[m][l - 1], "mc", est.mean, est)
            used, decoded = episodes_from_draws(params, draws, seed, stream)
            sim = mac_estimates(params, used, decoded)
            ref_ps = ps[an.NUMERIC]
            for comb, label in ((False, "printed"), (True, "combinatorial")):
                yield _row("p_suc", N, d2, L, label, an.p_success(params, ref_ps, comb),
                           "mc", sim["p_suc"].mean, sim["p_suc"])
                yield _row("t_bar", N, d2, L, label,
                           an.avg_transmissions(params, ref_ps, pc, comb),
                           "mc", sim["t_bar"].mean, sim["t_bar"])


def _row(quantity, N, d2, l, method, value, reference, ref_value, est=None):
    dev = abs(value - ref_value)
    return {
        "quantity": quantity, "N": N, "d2": d2, "l": l, "method": method,
        "value": value, "reference": reference, "reference_value": ref_value,
        "abs_dev": dev,
        "mc_hw95": None if est is None else est.half_width_95,
        "mc_trials": None if est is None else est.trials,
        "within_hw": "" if est is None else str(dev <= est.half_width_95).lower(),
    }


def write_report(rows, stream=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
