"""Point evaluation and multi-axis parameter sweeps.

A sweep takes a base scenario plus one or two axes over numeric scenario
keys and evaluates the Cartesian product in deterministic lexicographic
order (first axis outermost).  Per-point numerical failures are recorded
in the row's status column without aborting the sweep.  Output rows carry
full-precision (round-trippable) floats, so every row can be re-evaluated
through run_point to the same value; Monte-Carlo points reuse the
scenario seed unchanged for the same reason.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .capacity import (
    CapacityResult,
    build_constants,
    capacity_closed_form,
    capacity_monte_carlo,
    capacity_quadrature,
)
from .channel import absorption_gain, free_space_gain
from .config import ScenarioConfig, build_scenario
from .errors import AccuracyError, ConfigError, UnsupportedParametersError

__all__ = [
    "SWEEPABLE_KEYS",
    "AxisSpec",
    "SweepSpec",
    "parse_axis",
    "run_point",
    "run_sweep",
    "report_percent_change",
    "write_rows_csv",
    "write_rows_json",
    "write_point_csv",
    "write_point_json",
]

POINT_SCHEMA = "thzlink/point/v1"
SWEEP_SCHEMA = "thzlink/sweep/v1"

SWEEPABLE_KEYS = (
    "freq_ghz",
    "distance_m",
    "gt_dbi",
    "gr_dbi",
    "snr0_db",
    "temp_k",
    "pressure_pa",
    "rh_percent",
    "aperture_m",
    "beam_radius_m",
    "sigma_s_m",
    "alpha",
    "mu",
    "hhat",
    "kappa_per_m",
)

_METHOD_ORDER = ("closed_form", "quadrature", "monte_carlo")


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: a numeric scenario key and its value list."""

    key: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.key not in SWEEPABLE_KEYS:
            raise ConfigError(
                f"axis {self.key!r} is not a sweepable numeric scenario key "
                f"(choose from {', '.join(SWEEPABLE_KEYS)})"
            )
        if not self.values:
            raise ConfigError(f"axis {self.key!r}: empty value grid")
        if any(not math.isfinite(v) for v in self.values):
            raise ConfigError(f"axis {self.key!r}: non-finite grid value")


@dataclass(frozen=True)
class SweepSpec:
    """Base scenario (raw flat keys) plus 1-2 axes."""

    base_raw: dict
    axes: tuple[AxisSpec, ...]

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("sweep needs 1 or 2 axes")
        keys = [axis.key for axis in self.axes]
        if len(set(keys)) != len(keys):
            raise ConfigError("sweep axes must use distinct keys")


def parse_axis(text: str) -> AxisSpec:
    """Parse 'key=v1,v2,...' or 'key=start:stop:count' into an AxisSpec."""
    if "=" not in text:
        raise ConfigError(f"axis {text!r}: expected key=values")
    key, _, body = text.partition("=")
    key = key.strip()
    body = body.strip()
    if ":" in body:
        parts = body.split(":")
        if len(parts) != 3:
            raise ConfigError(f"axis {text!r}: grid form is start:stop:count")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"axis {text!r}: non-numeric grid bounds") from None
        if count < 1:
            raise ConfigError(f"axis {text!r}: count must be >= 1")
        if count == 1:
            values = (start,)
        else:
            step = (stop - start) / (count - 1)
            values = tuple(start + i * step for i in range(count))
    else:
        try:
            values = tuple(float(v) for v in body.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"axis {text!r}: non-numeric value") from None
    return AxisSpec(key=key, values=values)


def _evaluate_methods(config: ScenarioConfig) -> list[CapacityResult]:
    methods = _METHOD_ORDER if config.method == "all" else (config.method,)
    results = []
    for method in methods:
        if method == "monte_carlo":
            results.append(
                capacity_monte_carlo(
                    config.link, config.env, config.provider, config.geom,
                    config.fading, n=config.samples, seed=config.seed,
                )
            )
        else:
            constants = build_constants(
                config.link, config.env, config.provider, config.geom, config.fading
            )
            fn = capacity_closed_form if method == "closed_form" else capacity_quadrature
            results.append(fn(constants))
    return results


def run_point(config: ScenarioConfig) -> dict:
    """Evaluate one scenario; returns the structured report."""
    kappa = config.provider.kappa(config.link.freq_hz, config.env)
    h_fl = free_space_gain(config.link)
    h_al = absorption_gain(kappa, config.link.distance_m)
    h_l = h_fl * h_al
    a, mu, h_hat = config.fading.alpha, config.fading.mu, config.fading.h_hat
    xi, a_o = config.geom.xi, config.geom.A_o
    # theta can leave the double range for extreme xi; the Monte-Carlo
    # method stays valid there, so the report just blanks it.
    try:
        theta = xi * a_o ** (-xi) * mu ** (xi / a) / (h_hat**xi * math.gamma(mu))
        if not math.isfinite(theta):
            theta = None
    except OverflowError:
        theta = None
    results = _evaluate_methods(config)

    report = {
        "schema": POINT_SCHEMA,
        "inputs": {key: config.raw.get(key) for key in sorted(config.raw)},
        "derived": {
            "kappa_per_m": kappa,
            "h_fl": h_fl,
            "h_al": h_al,
            "h_l": h_l,
            "u": config.geom.u,
            "A_o": a_o,
            "w_eq_m": config.geom.w_eq,
            "xi": xi,
            "delta": h_l * h_l * config.link.snr0,
            "lambda": xi - 1.0,
            "phi": (a * mu - xi) / a,
            "phi_positive": (a * mu - xi) / a > 0.0,
            "x_scale": mu / (h_hat**a * a_o**a),
            "theta": theta,
        },
        "capacity": [
            {
                "method": r.method,
                "bits_per_s_per_hz": r.value,
                "std_error": r.std_error,
                "sample_count": r.sample_count,
                "warning": r.warning,
            }
            for r in results
        ],
    }
    if len(results) > 1:
        deviations = {}
        for left, right in itertools.combinations(results, 2):
            denom = max(abs(left.value), abs(right.value), 1e-300)
            deviations[f"{left.method}_vs_{right.method}"] = abs(left.value - right.value) / denom
        report["deviations"] = deviations
    return report


def run_sweep(spec: SweepSpec):
    """Evaluate the axis product; returns (columns, rows).

    Row layout: axis values (in axis order), then method, capacity,
    std_error, sample_count, status.  Failing points carry the error text
    in status and empty numeric fields.
    """
    columns = [axis.key for axis in spec.axes] + [
        "method",
        "capacity_bits_per_s_per_hz",
        "std_error",
        "sample_count",
        "status",
    ]
    rows: list[list] = []
    for combo in itertools.product(*(axis.values for axis in spec.axes)):
        raw = dict(spec.base_raw)
        for axis, value in zip(spec.axes, combo):
            raw[axis.key] = value
        prefix = list(combo)
        try:
            config = build_scenario(raw)
            for result in _evaluate_methods(config):
                rows.append(
                    prefix
                    + [result.method, result.value, result.std_error,
                       result.sample_count, "ok"]
                )
        except (ConfigError, UnsupportedParametersError, AccuracyError, ValueError, ArithmeticError) as exc:
            method = str(raw.get("method", "closed_form"))
            rows.append(prefix + [method, "", "", "", f"error: {exc}"])
    return columns, rows


def report_percent_change(columns, rows, from_selector: dict, to_selector: dict,
                          method: str | None = None) -> float:
    """Percentage capacity change 100*(C_from - C_to)/C_from between two
    sweep rows identified by exact axis values (and optionally method)."""

    def match(selector: dict):
        hits = []
        for row in rows:
            record = dict(zip(columns, row))
            if record["status"] != "ok":
                continue
            if method is not None and record["method"] != method:
                continue
            if all(_axis_equal(record.get(k), v) for k, v in selector.items()):
                hits.append(record)
        if not hits:
            raise ConfigError(f"percent-change selector {selector} matches no ok row")
        if len(hits) > 1:
            raise ConfigError(f"percent-change selector {selector} is ambiguous ({len(hits)} rows)")
        return hits[0]

    c_from = float(match(from_selector)["capacity_bits_per_s_per_hz"])
    c_to = float(match(to_selector)["capacity_bits_per_s_per_hz"])
    if c_from == 0.0:
        raise ConfigError("percent-change: reference capacity is zero")
    return 100.0 * (c_from - c_to) / c_from


def _axis_equal(actual, expected) -> bool:
    try:
        a, b = float(actual), float(expected)
    except (TypeError, ValueError):
        return str(actual) == str(expected)
    return a == b or abs(a - b) <= 1e-12 * max(abs(a), abs(b))


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_rows_csv(path: str | Path, columns, rows) -> None:
    """CSV writer: UTF-8, LF endings, full-precision floats."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_rows_json(path: str | Path, columns, rows, axes: tuple[AxisSpec, ...] = ()) -> None:
    payload = {
        "schema": SWEEP_SCHEMA,
        "axes": [{"key": axis.key, "values": list(axis.values)} for axis in axes],
        "columns": list(columns),
        "rows": [[v if not isinstance(v, float) else v for v in row] for row in rows],
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, allow_nan=False) + "\n", encoding="utf-8", newline="\n"
    )


def write_point_csv(path: str | Path, report: dict) -> None:
    columns = ["method", "capacity_bits_per_s_per_hz", "std_error", "sample_count"]
    rows = [
        [c["method"], c["bits_per_s_per_hz"], c["std_error"], c["sample_count"]]
        for c in report["capacity"]
    ]
    write_rows_csv(path, columns, rows)


def write_point_json(path: str | Path, report: dict) -> None:
    Path(path).write_text(
        json.dumps(report, indent=2, allow_nan=False) + "\n", encoding="utf-8", newline="\n"
    )
