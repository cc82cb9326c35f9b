"""Command-line front end.

Subcommands:
    capacity    point evaluation (one or all methods)
    sweep       1-2 axis parameter sweep with CSV/JSON emission
    mc          Monte-Carlo point run (method forced to monte_carlo)
    absorption  validate an absorption table and print kappa over a grid

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .absorption import TableAbsorption, bundled_table_path
from .channel import Environment
from .config import DEFAULTS, METHODS, build_scenario, parse_config_file
from .errors import AccuracyError, ConfigError, TableFormatError, UnsupportedParametersError
from .sweep import (
    SweepSpec,
    parse_axis,
    report_percent_change,
    run_point,
    run_sweep,
    write_point_csv,
    write_point_json,
    write_rows_csv,
    write_rows_json,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_SCENARIO_FLAGS = (
    # (flag, raw key, help)
    ("--freq-ghz", "freq_ghz", "carrier frequency in GHz"),
    ("--distance-m", "distance_m", "TX-RX distance in m"),
    ("--gt-dbi", "gt_dbi", "TX antenna gain in dBi"),
    ("--gr-dbi", "gr_dbi", "RX antenna gain in dBi"),
    ("--snr0-db", "snr0_db", "transmit power to noise ratio P/No in dB"),
    ("--temp-k", "temp_k", "temperature in K"),
    ("--pressure-pa", "pressure_pa", "pressure in Pa"),
    ("--rh-percent", "rh_percent", "relative humidity in percent"),
    ("--aperture-m", "aperture_m", "RX effective aperture radius in m (required)"),
    ("--beam-radius-m", "beam_radius_m", "beam footprint radius at the RX in m (required)"),
    ("--sigma-s-m", "sigma_s_m", "pointing jitter standard deviation in m (required)"),
    ("--alpha", "alpha", "fading shape alpha"),
    ("--mu", "mu", "fading parameter mu"),
    ("--hhat", "hhat", "alpha-root mean fading envelope"),
    ("--kappa-per-m", "kappa_per_m", "constant absorption coefficient in 1/m"),
)


def _add_scenario_args(parser: argparse.ArgumentParser, with_method: bool = True) -> None:
    parser.add_argument("--config", help="flat key = value scenario file")
    for flag, key, help_text in _SCENARIO_FLAGS:
        parser.add_argument(flag, dest=key, type=float, default=None, help=help_text)
    parser.add_argument("--kappa-table", dest="kappa_table", default=None,
                        help="absorption table CSV path, or 'bundled' for the sample table")
    if with_method:
        parser.add_argument("--method", choices=METHODS, default=None,
                            help=f"evaluation method (default {DEFAULTS['method']})")
    parser.add_argument("--samples", type=int, default=None,
                        help="Monte-Carlo sample count")
    parser.add_argument("--seed", type=int, default=None, help="Monte-Carlo seed")


def _collect_raw(args: argparse.Namespace, force_method: str | None = None) -> dict:
    raw: dict = {}
    if args.config:
        raw.update(parse_config_file(args.config))
    for _, key, _ in _SCENARIO_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    for key in ("kappa_table", "samples", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    method = force_method or getattr(args, "method", None)
    if method is not None:
        raw["method"] = method
    return raw


def _print_point_report(report: dict) -> None:
    print("inputs:")
    for key, value in report["inputs"].items():
        print(f"  {key} = {value}")
    print("derived:")
    for key, value in report["derived"].items():
        print(f"  {key} = {value}")
    print("capacity (bits/s/Hz):")
    for entry in report["capacity"]:
        line = f"  {entry['method']:<12} {entry['bits_per_s_per_hz']!r}"
        if entry["method"] == "monte_carlo":
            line += f"  (std_error {entry['std_error']!r}, n={entry['sample_count']})"
        if entry.get("warning"):
            line += f"  [warning: {entry['warning']}]"
        print(line)
    if "deviations" in report:
        print("pairwise relative deviations:")
        for key, value in report["deviations"].items():
            print(f"  {key} = {value:.3e}")


def _cmd_capacity(args: argparse.Namespace, force_method: str | None = None) -> int:
    config = build_scenario(_collect_raw(args, force_method=force_method))
    report = run_point(config)
    _print_point_report(report)
    if args.out:
        if args.format == "json":
            write_point_json(args.out, report)
        else:
            write_point_csv(args.out, report)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_mc(args: argparse.Namespace) -> int:
    return _cmd_capacity(args, force_method="monte_carlo")


def _parse_selector(text: str) -> dict:
    selector = {}
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f"selector {text!r}: expected axis=value[,axis=value]")
        key, _, value = part.partition("=")
        selector[key.strip()] = value.strip()
    return selector


def _cmd_sweep(args: argparse.Namespace) -> int:
    axes = tuple(parse_axis(text) for text in args.axis)
    spec = SweepSpec(base_raw=_collect_raw(args), axes=axes)
    columns, rows = run_sweep(spec)
    if args.out:
        if args.format == "json":
            write_rows_json(args.out, columns, rows, axes=axes)
        else:
            write_rows_csv(args.out, columns, rows)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        print(",".join(columns))
        for row in rows:
            print(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    if args.percent_from or args.percent_to:
        if not (args.percent_from and args.percent_to):
            raise ConfigError("--percent-from and --percent-to must be given together")
        change = report_percent_change(
            columns, rows,
            _parse_selector(args.percent_from),
            _parse_selector(args.percent_to),
            method=args.percent_method,
        )
        print(f"percent change {args.percent_from} -> {args.percent_to}: {change:.4f}%")
        if args.claimed_percent is not None:
            print(
                f"claimed: {args.claimed_percent:.4f}%  computed: {change:.4f}%  "
                f"difference: {change - args.claimed_percent:+.4f} points"
            )
    return EXIT_OK


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _cmd_absorption(args: argparse.Namespace) -> int:
    path = bundled_table_path() if args.kappa_table == "bundled" else args.kappa_table
    table = TableAbsorption.from_csv(path)
    freqs = _parse_float_list(args.freq_ghz) if args.freq_ghz else [
        f / 1e9 for f in table.axes[0]
    ]
    temps = _parse_float_list(args.temp_k) if args.temp_k else [float(DEFAULTS["temp_k"])]
    pressures = (
        _parse_float_list(args.pressure_pa) if args.pressure_pa
        else [float(DEFAULTS["pressure_pa"])]
    )
    hums = (
        _parse_float_list(args.rh_percent) if args.rh_percent
        else [float(DEFAULTS["rh_percent"])]
    )
    print(f"table {args.kappa_table}: axes "
          f"freq={len(table.axes[0])} temp={len(table.axes[1])} "
          f"pressure={len(table.axes[2])} rh={len(table.axes[3])}")
    print("freq_ghz,temp_k,pressure_pa,rh_percent,kappa_per_m,status")
    for fg in freqs:
        for tk in temps:
            for pp in pressures:
                for rh in hums:
                    try:
                        env = Environment(temp_k=tk, pressure_pa=pp, rel_humidity=rh / 100.0)
                        kappa = table.kappa(fg * 1e9, env)
                        print(f"{fg!r},{tk!r},{pp!r},{rh!r},{kappa!r},ok")
                    except ValueError as exc:
                        print(f"{fg!r},{tk!r},{pp!r},{rh!r},,error: {exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thzlink",
        description="Ergodic capacity of a THz link under misalignment and alpha-mu fading",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cap = sub.add_parser("capacity", help="evaluate one scenario")
    _add_scenario_args(p_cap)
    p_cap.add_argument("--out", help="write the capacity block to this file")
    p_cap.add_argument("--format", choices=("csv", "json"), default="csv")
    p_cap.set_defaults(func=_cmd_capacity)

    p_sweep = sub.add_parser("sweep", help="parameter sweep over 1-2 axes")
    _add_scenario_args(p_sweep)
    p_sweep.add_argument(
        "--axis", action="append", required=True,
        help="axis spec: key=v1,v2,... or key=start:stop:count (repeat for a second axis)",
    )
    p_sweep.add_argument("--out", help="output file path")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--percent-from", help="row selector axis=value[,axis=value]")
    p_sweep.add_argument("--percent-to", help="row selector axis=value[,axis=value]")
    p_sweep.add_argument("--percent-method", default=None,
                         help="method tag to select rows for the percent change")
    p_sweep.add_argument("--claimed-percent", type=float, default=None,
                         help="externally claimed percentage to print side by side")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_mc = sub.add_parser("mc", help="Monte-Carlo point run")
    _add_scenario_args(p_mc, with_method=False)
    p_mc.add_argument("--out", help="write the capacity block to this file")
    p_mc.add_argument("--format", choices=("csv", "json"), default="csv")
    p_mc.set_defaults(func=_cmd_mc)

    p_abs = sub.add_parser("absorption", help="inspect an absorption table")
    p_abs.add_argument("--kappa-table", required=True, help="absorption table CSV path, or 'bundled' for the sample table")
    p_abs.add_argument("--freq-ghz", help="comma list of query frequencies in GHz")
    p_abs.add_argument("--temp-k", help="comma list of query temperatures in K")
    p_abs.add_argument("--pressure-pa", help="comma list of query pressures in Pa")
    p_abs.add_argument("--rh-percent", help="comma list of query humidities in percent")
    p_abs.set_defaults(func=_cmd_absorption)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TableFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnsupportedParametersError, AccuracyError, ArithmeticError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
