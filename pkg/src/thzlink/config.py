"""Scenario assembly for the CLI: flat-key configuration files,
engineering-unit conversion, and validation with field-path diagnostics.

The boundary accepts engineering units (GHz, dBi, dB, %RH, m) through the
flat keys below and converts once; the core modules only ever see base SI
/ linear quantities.  Precedence is flag > config file > default.

Config-file grammar (one key per line, '#' starts a comment):

    key = value

with keys drawn from SCENARIO_KEYS.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .absorption import (
    AbsorptionProvider,
    ConstantAbsorption,
    TableAbsorption,
    bundled_table_path,
)
from .channel import (
    AlphaMuParams,
    Environment,
    LinkParams,
    MisalignmentGeometry,
    derive_misalignment,
)
from .errors import ConfigError

__all__ = [
    "SCENARIO_KEYS",
    "DEFAULTS",
    "METHODS",
    "ScenarioConfig",
    "parse_config_file",
    "build_scenario",
]

METHODS = ("closed_form", "quadrature", "monte_carlo", "all")

# Flat scenario keys, their internal field paths, and parsers.
_NUMERIC_KEYS = {
    "freq_ghz": "link.f",
    "distance_m": "link.d",
    "gt_dbi": "link.G_t",
    "gr_dbi": "link.G_r",
    "snr0_db": "link.snr0",
    "temp_k": "env.T",
    "pressure_pa": "env.p",
    "rh_percent": "env.phi",
    "aperture_m": "geom.a",
    "beam_radius_m": "geom.w_d",
    "sigma_s_m": "geom.sigma_s",
    "alpha": "fading.alpha",
    "mu": "fading.mu",
    "hhat": "fading.h_hat",
    "kappa_per_m": "absorption.kappa",
    "samples": "mc.samples",
    "seed": "mc.seed",
}
_STRING_KEYS = {
    "kappa_table": "absorption.table",
    "method": "method",
}
SCENARIO_KEYS = tuple(_NUMERIC_KEYS) + tuple(_STRING_KEYS)

# Documented defaults.  Geometry (aperture_m, beam_radius_m, sigma_s_m) and
# the absorption backend have no defaults on purpose: they must be given.
DEFAULTS: dict[str, object] = {
    "freq_ghz": 300.0,
    "distance_m": 40.0,
    "gt_dbi": 55.0,
    "gr_dbi": 55.0,
    "snr0_db": 25.0,
    "temp_k": 296.0,
    "pressure_pa": 101325.0,
    "rh_percent": 50.0,
    "alpha": 2.0,
    "mu": 4.0,
    "hhat": 1.0,
    "method": "closed_form",
    "samples": 1_000_000,
    "seed": 1234,
}

_MANDATORY = ("aperture_m", "beam_radius_m", "sigma_s_m")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated point-evaluation scenario (core units)."""

    link: LinkParams
    env: Environment
    geom: MisalignmentGeometry
    fading: AlphaMuParams
    provider: AbsorptionProvider
    method: str
    samples: int
    seed: int
    raw: dict


def parse_config_file(path: str | Path) -> dict:
    """Read a flat key = value config file into a raw scenario dict."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        raw[key] = value
    return raw


def _as_float(raw: dict, key: str) -> float:
    value = raw[key]
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{_path(key)}: expected a number, got {value!r}") from None


def _as_int(raw: dict, key: str) -> int:
    value = raw[key]
    try:
        out = int(str(value))
    except (TypeError, ValueError):
        raise ConfigError(f"{_path(key)}: expected an integer, got {value!r}") from None
    return out


def _path(key: str) -> str:
    return _NUMERIC_KEYS.get(key) or _STRING_KEYS.get(key) or key


def _require_positive(key: str, value: float) -> float:
    if not value > 0.0:
        raise ConfigError(f"{_path(key)}: must be > 0, got {value!r}")
    return value


def build_scenario(raw: dict) -> ScenarioConfig:
    """Validate a raw flat-key dict (engineering units) into a ScenarioConfig.

    Raises ConfigError carrying the internal field path of the first
    offending entry (e.g. 'geom.sigma_s' for a bad sigma_s_m).
    """
    merged = dict(DEFAULTS)
    for key, value in raw.items():
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"unknown scenario key {key!r}")
        merged[key] = value

    for key in _MANDATORY:
        if key not in merged:
            raise ConfigError(f"{_path(key)}: required (no default); set {key}")

    freq_hz = _require_positive("freq_ghz", _as_float(merged, "freq_ghz")) * 1e9
    distance = _require_positive("distance_m", _as_float(merged, "distance_m"))
    gain_tx = 10.0 ** (_as_float(merged, "gt_dbi") / 10.0)
    gain_rx = 10.0 ** (_as_float(merged, "gr_dbi") / 10.0)
    snr0 = 10.0 ** (_as_float(merged, "snr0_db") / 10.0)

    temp_k = _require_positive("temp_k", _as_float(merged, "temp_k"))
    pressure = _require_positive("pressure_pa", _as_float(merged, "pressure_pa"))
    rh_percent = _as_float(merged, "rh_percent")
    if not 0.0 <= rh_percent <= 100.0:
        raise ConfigError(f"env.phi: rh_percent must be in [0, 100], got {rh_percent!r}")

    aperture = _require_positive("aperture_m", _as_float(merged, "aperture_m"))
    beam_radius = _require_positive("beam_radius_m", _as_float(merged, "beam_radius_m"))
    sigma_s = _require_positive("sigma_s_m", _as_float(merged, "sigma_s_m"))

    alpha = _require_positive("alpha", _as_float(merged, "alpha"))
    mu = _require_positive("mu", _as_float(merged, "mu"))
    h_hat = _require_positive("hhat", _as_float(merged, "hhat"))

    has_const = "kappa_per_m" in merged
    has_table = "kappa_table" in merged
    if has_const == has_table:
        raise ConfigError(
            "absorption: exactly one backend required; set kappa_per_m or kappa_table"
        )
    if has_const:
        kappa = _as_float(merged, "kappa_per_m")
        if kappa < 0.0:
            raise ConfigError(f"absorption.kappa: must be >= 0, got {kappa!r}")
        provider: AbsorptionProvider = ConstantAbsorption(kappa)
    else:
        table_ref = str(merged["kappa_table"])
        if table_ref == "bundled":
            table_path = bundled_table_path()
        else:
            table_path = Path(table_ref)
        if not table_path.is_file():
            raise ConfigError(f"absorption.table: file not found: {table_path}")
        provider = TableAbsorption.from_csv(table_path)

    method = str(merged["method"])
    if method not in METHODS:
        raise ConfigError(f"method: must be one of {METHODS}, got {method!r}")
    samples = _as_int(merged, "samples")
    if samples < 1:
        raise ConfigError(f"mc.samples: must be >= 1, got {samples}")
    seed = _as_int(merged, "seed")

    return ScenarioConfig(
        link=LinkParams(
            freq_hz=freq_hz, distance_m=distance, gain_tx=gain_tx,
            gain_rx=gain_rx, snr0=snr0,
        ),
        env=Environment(temp_k=temp_k, pressure_pa=pressure, rel_humidity=rh_percent / 100.0),
        geom=derive_misalignment(aperture, beam_radius, sigma_s),
        fading=AlphaMuParams(alpha=alpha, mu=mu, h_hat=h_hat),
        provider=provider,
        method=method,
        samples=samples,
        seed=seed,
        raw=dict(merged),
    )
