import pytest

from thzlink.absorption import ConstantAbsorption, TableAbsorption, bundled_table_path, kappa_lookup
from thzlink.channel import Environment
from thzlink.errors import TableFormatError

HEADER = "freq_hz,temp_k,pressure_pa,rel_humidity,kappa_per_m"


def write_table(tmp_path, rows, header=HEADER, prefix=""):
    path = tmp_path / "table.csv"
    path.write_text(prefix + header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return path


# 2 freqs x 2 temps x 1 pressure x 1 humidity
SMALL_ROWS = [
    "275e9,290,101325,0.5,0.010",
    "275e9,300,101325,0.5,0.014",
    "300e9,290,101325,0.5,0.020",
    "300e9,300,101325,0.5,0.030",
]


class TestConstantBackend:
    def test_echoes_value(self, default_env):
        provider = ConstantAbsorption(0.05)
        assert provider.backend == "constant"
        assert kappa_lookup(provider, 123e9, default_env) == 0.05
        assert kappa_lookup(provider, 999e9, Environment(temp_k=200.0)) == 0.05

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ConstantAbsorption(-0.01)


class TestTableLoader:
    def test_bundled_table_loads(self):
        table = TableAbsorption.from_csv(bundled_table_path())
        assert table.backend == "table"
        assert tuple(len(ax) for ax in table.axes) == (6, 3, 3, 5)

    def test_small_table(self, tmp_path):
        table = TableAbsorption.from_csv(write_table(tmp_path, SMALL_ROWS))
        assert tuple(len(ax) for ax in table.axes) == (2, 2, 1, 1)

    def test_comment_lines_allowed(self, tmp_path):
        path = write_table(tmp_path, SMALL_ROWS, prefix="# synthetic\n# table\n")
        TableAbsorption.from_csv(path)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(SMALL_ROWS) + "\n", encoding="utf-8")
        with pytest.raises(TableFormatError):
            TableAbsorption.from_csv(path)

    def test_wrong_column_order(self, tmp_path):
        with pytest.raises(TableFormatError):
            TableAbsorption.from_csv(write_table(
                tmp_path, SMALL_ROWS, header="temp_k,freq_hz,pressure_pa,rel_humidity,kappa_per_m"))

    def test_non_numeric_value_reports_line(self, tmp_path):
        rows = SMALL_ROWS[:2] + ["300e9,290,101325,0.5,oops"] + SMALL_ROWS[3:]
        with pytest.raises(TableFormatError) as err:
            TableAbsorption.from_csv(write_table(tmp_path, rows))
        assert err.value.line == 4

    def test_negative_kappa_rejected(self, tmp_path):
        rows = SMALL_ROWS[:3] + ["300e9,300,101325,0.5,-0.001"]
        with pytest.raises(TableFormatError):
            TableAbsorption.from_csv(write_table(tmp_path, rows))

    def test_incomplete_grid_rejected(self, tmp_path):
        with pytest.raises(TableFormatError):
            TableAbsorption.from_csv(write_table(tmp_path, SMALL_ROWS[:3]))

    def test_duplicate_node_rejected(self, tmp_path):
        rows = SMALL_ROWS[:3] + [SMALL_ROWS[2]]
        with pytest.raises(TableFormatError):
            TableAbsorption.from_csv(write_table(tmp_path, rows))

    def test_wrong_column_count_reports_line(self, tmp_path):
        rows = SMALL_ROWS[:1] + ["275e9,300,101325,0.5"] + SMALL_ROWS[2:]
        with pytest.raises(TableFormatError) as err:
            TableAbsorption.from_csv(write_table(tmp_path, rows))
        assert err.value.line == 3


class TestInterpolation:
    @pytest.fixture
    def table(self, tmp_path):
        return TableAbsorption.from_csv(write_table(tmp_path, SMALL_ROWS))

    def test_node_identity(self, table):
        env = Environment(temp_k=290.0, pressure_pa=101325.0, rel_humidity=0.5)
        assert table.kappa(275e9, env) == 0.010
        assert table.kappa(300e9, env) == 0.020

    def test_midpoint_is_mean_along_one_axis(self, table):
        env = Environment(temp_k=290.0, pressure_pa=101325.0, rel_humidity=0.5)
        assert table.kappa(287.5e9, env) == pytest.approx(0.015, rel=1e-14)
        env_mid = Environment(temp_k=295.0, pressure_pa=101325.0, rel_humidity=0.5)
        assert table.kappa(275e9, env_mid) == pytest.approx(0.012, rel=1e-14)

    def test_bilinear_interior(self, table):
        env = Environment(temp_k=292.5, pressure_pa=101325.0, rel_humidity=0.5)
        # weights 0.5 on freq, 0.25 on temp
        expected = 0.75 * (0.5 * (0.010 + 0.020)) + 0.25 * (0.5 * (0.014 + 0.030))
        assert table.kappa(287.5e9, env) == pytest.approx(expected, rel=1e-14)

    def test_out_of_hull_rejected(self, table):
        env = Environment(temp_k=290.0, pressure_pa=101325.0, rel_humidity=0.5)
        with pytest.raises(ValueError, match="hull"):
            table.kappa(274e9, env)
        with pytest.raises(ValueError, match="hull"):
            table.kappa(301e9, env)
        with pytest.raises(ValueError, match="hull"):
            table.kappa(275e9, Environment(temp_k=289.0, rel_humidity=0.5))
        with pytest.raises(ValueError, match="hull"):
            table.kappa(275e9, Environment(temp_k=290.0, pressure_pa=90000.0, rel_humidity=0.5))
        with pytest.raises(ValueError, match="hull"):
            table.kappa(275e9, Environment(temp_k=290.0, rel_humidity=0.4))

    def test_hull_boundary_accepted(self, table):
        env = Environment(temp_k=300.0, pressure_pa=101325.0, rel_humidity=0.5)
        assert table.kappa(300e9, env) == 0.030

    def test_bundled_monotone_in_frequency_and_humidity(self, default_env):
        table = TableAbsorption.from_csv(bundled_table_path())
        freqs = [275e9, 300e9, 350e9, 400e9]
        vals = [table.kappa(f, default_env) for f in freqs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        hums = [0.0, 0.25, 0.75, 1.0]
        at_380 = [table.kappa(380e9, Environment(rel_humidity=h)) for h in hums]
        assert all(a < b for a, b in zip(at_380, at_380[1:]))
