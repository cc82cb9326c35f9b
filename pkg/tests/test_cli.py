import json
import math
import subprocess
import sys

import pytest

from thzlink.cli import main
from thzlink.config import build_scenario, parse_config_file
from thzlink.errors import ConfigError
from thzlink.sweep import (
    AxisSpec,
    SweepSpec,
    parse_axis,
    report_percent_change,
    run_point,
    run_sweep,
)

BASE_ARGS = [
    "--sigma-s-m", "0.02", "--aperture-m", "0.05", "--beam-radius-m", "0.06",
    "--kappa-per-m", "0.002",
]
BASE_RAW = {
    "sigma_s_m": 0.02, "aperture_m": 0.05, "beam_radius_m": 0.06,
    "kappa_per_m": 0.002,
}


class TestConfigHandling:
    def test_defaults_fill_in(self):
        config = build_scenario(dict(BASE_RAW))
        assert config.link.freq_hz == 300e9
        assert config.link.snr0 == pytest.approx(10**2.5)
        assert config.env.rel_humidity == 0.5
        assert config.method == "closed_form"

    def test_engineering_unit_conversion(self):
        config = build_scenario(dict(BASE_RAW, freq_ghz=350, gt_dbi=50, rh_percent=30))
        assert config.link.freq_hz == 350e9
        assert config.link.gain_tx == pytest.approx(1e5)
        assert config.env.rel_humidity == pytest.approx(0.3)

    def test_field_path_diagnostics(self):
        with pytest.raises(ConfigError, match=r"geom\.sigma_s"):
            build_scenario(dict(BASE_RAW, sigma_s_m=-1))
        with pytest.raises(ConfigError, match=r"link\.d"):
            build_scenario(dict(BASE_RAW, distance_m=0))
        with pytest.raises(ConfigError, match=r"env\.phi"):
            build_scenario(dict(BASE_RAW, rh_percent=150))

    def test_exactly_one_absorption_backend(self):
        raw = dict(BASE_RAW)
        del raw["kappa_per_m"]
        with pytest.raises(ConfigError, match="absorption"):
            build_scenario(raw)
        with pytest.raises(ConfigError, match="absorption"):
            build_scenario(dict(BASE_RAW, kappa_table="bundled"))

    def test_missing_geometry_is_an_error(self):
        with pytest.raises(ConfigError, match=r"geom\.a"):
            build_scenario({"kappa_per_m": 0.0, "sigma_s_m": 0.02, "beam_radius_m": 0.06})

    def test_config_file_roundtrip(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        path.write_text(
            "# comment line\n"
            "sigma_s_m = 0.02   # trailing comment\n"
            "aperture_m = 0.05\n"
            "beam_radius_m = 0.06\n"
            "kappa_per_m = 0.002\n"
            "snr0_db = 30\n",
            encoding="utf-8",
        )
        raw = parse_config_file(path)
        assert raw["snr0_db"] == "30"
        config = build_scenario(raw)
        assert config.link.snr0 == pytest.approx(1000.0)

    def test_config_file_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("unknown_thing = 1\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_file(path)

    def test_flag_overrides_config(self, tmp_path, capsys):
        path = tmp_path / "scenario.cfg"
        path.write_text(
            "sigma_s_m = 0.02\naperture_m = 0.05\nbeam_radius_m = 0.06\n"
            "kappa_per_m = 0.002\ndistance_m = 20\n",
            encoding="utf-8",
        )
        assert main(["capacity", "--config", str(path), "--distance-m", "60"]) == 0
        out = capsys.readouterr().out
        assert "distance_m = 60.0" in out


class TestRunPoint:
    def test_all_methods_agree(self):
        config = build_scenario(dict(BASE_RAW, method="all", samples=10**6, seed=7))
        report = run_point(config)
        methods = [c["method"] for c in report["capacity"]]
        assert methods == ["closed_form", "quadrature", "monte_carlo"]
        assert all(v < 1e-3 for v in report["deviations"].values())

    def test_derived_block(self):
        config = build_scenario(dict(BASE_RAW))
        report = run_point(config)
        derived = report["derived"]
        assert derived["h_l"] == pytest.approx(derived["h_fl"] * derived["h_al"], rel=1e-14)
        assert derived["xi"] == pytest.approx(config.geom.xi)
        assert derived["phi_positive"] == (derived["phi"] > 0)

    def test_rayleigh_degenerate_scenario(self):
        # kappa = 0, tiny jitter, Rayleigh fading: the report matches the
        # from-scratch Rayleigh Monte-Carlo oracle
        from oracles import rayleigh_capacity_mc
        from thzlink.channel import deterministic_gain

        raw = dict(BASE_RAW, kappa_per_m=0.0, sigma_s_m=1e-7, alpha=2, mu=1,
                   method="monte_carlo", samples=10**6, seed=3)
        config = build_scenario(raw)
        report = run_point(config)
        entry = report["capacity"][0]
        h_l = deterministic_gain(config.link, config.env, config.provider)
        ref, ref_se = rayleigh_capacity_mc(h_l, config.link.snr0, config.geom.A_o,
                                           config.geom.w_eq, config.geom.sigma_s_m,
                                           n=10**6, seed=44)
        se = math.hypot(entry["std_error"], ref_se)
        assert abs(entry["bits_per_s_per_hz"] - ref) < 3.0 * se

    def test_extreme_xi_closed_form_reports_unsupported(self, capsys):
        # tiny jitter pushes xi beyond the closed form's double range: the
        # CLI surfaces a numerical error (exit 3) rather than garbage
        code = main(["capacity", "--sigma-s-m", "1e-7", "--aperture-m", "0.05",
                     "--beam-radius-m", "0.06", "--kappa-per-m", "0"])
        assert code == 3
        assert "xi" in capsys.readouterr().err


class TestSweep:
    def test_axis_parsing(self):
        axis = parse_axis("distance_m=20:60:5")
        assert axis.key == "distance_m"
        assert axis.values == (20.0, 30.0, 40.0, 50.0, 60.0)
        axis = parse_axis("mu=1,3,8")
        assert axis.values == (1.0, 3.0, 8.0)
        with pytest.raises(ConfigError):
            parse_axis("method=closed_form,quadrature")
        with pytest.raises(ConfigError):
            parse_axis("distance_m=")
        with pytest.raises(ConfigError):
            AxisSpec(key="distance_m", values=(float("nan"),))

    def test_capacity_decreases_with_distance(self):
        spec = SweepSpec(base_raw=dict(BASE_RAW), axes=(parse_axis("distance_m=20:60:5"),))
        columns, rows = run_sweep(spec)
        caps = [r[columns.index("capacity_bits_per_s_per_hz")] for r in rows]
        assert all(r[-1] == "ok" for r in rows)
        assert all(a > b for a, b in zip(caps, caps[1:]))

    def test_capacity_decreases_with_jitter(self):
        spec = SweepSpec(base_raw=dict(BASE_RAW),
                         axes=(parse_axis("sigma_s_m=0.01,0.02,0.05,0.1"),))
        columns, rows = run_sweep(spec)
        caps = [r[columns.index("capacity_bits_per_s_per_hz")] for r in rows]
        assert all(a > b for a, b in zip(caps, caps[1:]))

    def test_single_point_sweep_equals_run_point(self):
        spec = SweepSpec(base_raw=dict(BASE_RAW), axes=(AxisSpec("distance_m", (40.0,)),))
        columns, rows = run_sweep(spec)
        assert len(rows) == 1
        point = run_point(build_scenario(dict(BASE_RAW, distance_m=40.0)))
        assert rows[0][columns.index("capacity_bits_per_s_per_hz")] == \
            point["capacity"][0]["bits_per_s_per_hz"]

    def test_rows_reevaluate_through_run_point(self):
        spec = SweepSpec(base_raw=dict(BASE_RAW), axes=(parse_axis("distance_m=25,45"),))
        columns, rows = run_sweep(spec)
        for row in rows:
            record = dict(zip(columns, row))
            # round-trip through the textual cell representation
            distance = float(repr(record["distance_m"]))
            again = run_point(build_scenario(dict(BASE_RAW, distance_m=distance)))
            value = again["capacity"][0]["bits_per_s_per_hz"]
            assert abs(value - record["capacity_bits_per_s_per_hz"]) <= 1e-12 * abs(value)

    def test_two_axis_order_is_lexicographic(self):
        spec = SweepSpec(base_raw=dict(BASE_RAW),
                         axes=(parse_axis("distance_m=20,40"), parse_axis("mu=1,4")))
        columns, rows = run_sweep(spec)
        combos = [(r[0], r[1]) for r in rows]
        assert combos == [(20.0, 1.0), (20.0, 4.0), (40.0, 1.0), (40.0, 4.0)]

    def test_per_point_failures_do_not_abort(self):
        # second distance is invalid (negative): error row, sweep continues
        spec = SweepSpec(base_raw=dict(BASE_RAW), axes=(parse_axis("distance_m=40,-5,60"),))
        columns, rows = run_sweep(spec)
        status = [r[-1] for r in rows]
        assert status[0] == "ok" and status[2] == "ok"
        assert status[1].startswith("error:")

    def test_percent_change(self):
        columns = ["d", "method", "capacity_bits_per_s_per_hz", "std_error",
                   "sample_count", "status"]
        rows = [[20.0, "closed_form", 4.0, 0.0, 0, "ok"],
                [40.0, "closed_form", 2.0, 0.0, 0, "ok"]]
        assert report_percent_change(columns, rows, {"d": 20}, {"d": 20}) == 0.0
        assert report_percent_change(columns, rows, {"d": 20}, {"d": 40}) == pytest.approx(50.0)
        with pytest.raises(ConfigError):
            report_percent_change(columns, rows, {"d": 99}, {"d": 20})


class TestCliInterface:
    def test_point_exit_ok(self, capsys):
        assert main(["capacity", *BASE_ARGS]) == 0
        out = capsys.readouterr().out
        assert "closed_form" in out

    def test_invalid_config_exit_2(self, capsys):
        code = main(["capacity", "--sigma-s-m", "-1", "--aperture-m", "0.05",
                     "--beam-radius-m", "0.06", "--kappa-per-m", "0"])
        assert code == 2
        assert "geom.sigma_s" in capsys.readouterr().err

    def test_missing_backend_exit_2(self, capsys):
        code = main(["capacity", "--sigma-s-m", "0.02", "--aperture-m", "0.05",
                     "--beam-radius-m", "0.06"])
        assert code == 2
        assert "absorption" in capsys.readouterr().err

    def test_sweep_csv_deterministic(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sweep", *BASE_ARGS, "--method", "monte_carlo", "--samples", "50000",
                "--seed", "11", "--axis", "distance_m=20:40:3"]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()

    def test_sweep_json_schema(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert main(["sweep", *BASE_ARGS, "--axis", "distance_m=20,40",
                     "--format", "json", "--out", str(out)]) == 0
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["schema"] == "thzlink/sweep/v1"
        assert payload["axes"][0]["key"] == "distance_m"
        assert len(payload["rows"]) == 2

    def test_sweep_percent_change_flags(self, tmp_path, capsys):
        code = main(["sweep", *BASE_ARGS, "--axis", "distance_m=20,50",
                     "--percent-from", "distance_m=20", "--percent-to", "distance_m=50",
                     "--claimed-percent", "60.8"])
        assert code == 0
        out = capsys.readouterr().out
        assert "percent change" in out
        assert "claimed: 60.8" in out

    def test_mc_subcommand_deterministic(self, tmp_path, capsys):
        out1, out2 = tmp_path / "m1.json", tmp_path / "m2.json"
        argv = ["mc", *BASE_ARGS, "--samples", "50000", "--seed", "4", "--format", "json"]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()
        payload = json.loads(out1.read_text())
        assert payload["schema"] == "thzlink/point/v1"
        assert payload["capacity"][0]["method"] == "monte_carlo"

    def test_absorption_inspect(self, capsys):
        assert main(["absorption", "--kappa-table", "bundled",
                     "--freq-ghz", "275,287.5,500"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l and l[0].isdigit()]
        assert lines[0].startswith("275.0,")
        assert ",ok" in lines[0]
        assert "error" in lines[2]

    def test_absorption_malformed_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("freq_hz,temp_k,pressure_pa,rel_humidity,kappa_per_m\n1,2,3\n",
                       encoding="utf-8")
        assert main(["absorption", "--kappa-table", str(bad)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_console_script_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "thzlink.cli", "capacity", *BASE_ARGS],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "closed_form" in proc.stdout
