"""Tests for the capture-series command line.

Covers:
- build_config: schema validation, defaults and the float-digits environment variable
- dispatch: exit codes 0 / 1 / 2 and the structured error on stderr
- each subcommand's CSV or JSON output
"""

import json

import pytest

from capture_series.cli import build_config, dispatch
from capture_series.const import ENV_FLOAT_DIGITS, EXIT_COMPUTATION_ERROR, EXIT_CONFIG_ERROR, EXIT_OK
from capture_series.exceptions import ConfigError


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(out: str) -> list[list[str]]:
    lines = out.split("\r\n")
    assert lines[0].startswith("# capture-series ")
    return [line.split(",") for line in lines[1:] if line and not line.startswith("#")]


def csv_notes(out: str) -> list[str]:
    """Comment lines after the config comment, without the leading "# "."""
    return [line[2:] for line in out.split("\r\n")[1:] if line.startswith("# ")]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class TestBuildConfig:
    """Arguments are validated before anything is computed."""

    def test_defaults(self, monkeypatch):
        """Omitted options take the documented defaults."""
        monkeypatch.delenv(ENV_FLOAT_DIGITS, raising=False)
        config = build_config(["critical"])
        assert config.params == {"order": 30, "rows": None}
        assert config.output_format == "csv"
        assert config.float_digits == 8
        assert config.explicit_digits is False

    def test_env_float_digits(self, monkeypatch):
        """The environment variable sets the default precision."""
        monkeypatch.setenv(ENV_FLOAT_DIGITS, "5")
        assert build_config(["critical"]).float_digits == 5

    def test_flag_overrides_env(self, monkeypatch):
        """--float-digits wins over the environment."""
        monkeypatch.setenv(ENV_FLOAT_DIGITS, "5")
        config = build_config(["critical", "--float-digits", "12"])
        assert config.float_digits == 12
        assert config.explicit_digits is True

    def test_invalid_env_float_digits(self, monkeypatch):
        """A non-integer environment value is a configuration error."""
        monkeypatch.setenv(ENV_FLOAT_DIGITS, "many")
        with pytest.raises(ConfigError):
            build_config(["critical"])

    def test_float_digits_range(self):
        """Precision is limited to 1 … 60."""
        with pytest.raises(ConfigError):
            build_config(["critical", "--float-digits", "0"])

    @pytest.mark.parametrize(
        "argv",
        [
            ["coeffs", "--count", "0"],
            ["critical", "--order", "0"],
            ["separatrix", "--points", "1"],
            ["solution", "--x0", "0.4", "--u0", "-0.3", "--epsilon", "-1"],
            ["solution", "--x0", "nan", "--u0", "-0.3"],
            ["trace-separatrix", "--delta", "0.1"],
            ["portrait", "--x-range", "1:0"],
            ["portrait", "--resolution", "3"],
            ["fate", "--x0", "0.5", "--u0", "-0.25", "--rel-tol", "0"],
            ["domb-sykes", "--count", "2"],
        ],
    )
    def test_rejected_parameters(self, argv):
        """Out-of-range or malformed values raise ConfigError."""
        with pytest.raises(ConfigError):
            build_config(argv)

    def test_pairs_and_lists_parsed(self):
        """LO:HI, NX:NU and comma lists become tuples and lists."""
        config = build_config(["portrait", "--x-range", "0:1", "--u-range=-1:0.5", "--resolution", "4:3"])
        assert config.params["x_range"] == (0.0, 1.0)
        assert config.params["u_range"] == (-1.0, 0.5)
        assert list(config.params["resolution"]) == [4, 3]
        assert build_config(["critical", "--rows", "1,2,10"]).params["rows"] == [1, 2, 10]

    def test_negative_range_equals_form(self):
        """A range starting with '-' is read as a value when attached with '='."""
        config = build_config(["portrait", "--u-range=-1.5:0.5", "--x-range=-0.5:1"])
        assert config.params["u_range"] == (-1.5, 0.5)
        assert config.params["x_range"] == (-0.5, 1.0)

    def test_dataset_ranges(self):
        """dataset accepts z and portrait ranges and drops unset options."""
        config = build_config(["dataset", "fig2-separatrix", "--z-min", "0.1", "--z-max", "0.9"])
        assert config.params == {"figure": "fig2-separatrix", "out_dir": ".", "z_min": 0.1, "z_max": 0.9}
        config = build_config(["dataset", "fig1-portrait", "--x-range", "0:1", "--u-range=-1:0"])
        assert config.params["u_range"] == (-1.0, 0.0)

    @pytest.mark.parametrize(
        "argv",
        [
            ["dataset", "fig3-terms", "--points", "5"],
            ["dataset", "fig4-domb-sykes", "--z-max", "0.5"],
            ["dataset", "fig2-separatrix", "--resolution", "3:3"],
        ],
    )
    def test_dataset_rejects_unused_options(self, argv):
        """Options the chosen figure does not read are errors, not silently ignored."""
        with pytest.raises(ConfigError) as excinfo:
            build_config(argv)
        assert excinfo.value.context["unused"]


# ---------------------------------------------------------------------------
# Exit codes and errors
# ---------------------------------------------------------------------------


class TestDispatch:
    """dispatch() maps outcomes to exit codes."""

    def test_missing_command(self, capsys):
        """No subcommand is a configuration error."""
        code, _, err = run(capsys)
        assert code == EXIT_CONFIG_ERROR
        assert json.loads(err)["error"] == "ConfigError"

    def test_unknown_flag(self, capsys):
        """Unknown flags are configuration errors."""
        code, _, _ = run(capsys, "coeffs", "--bogus")
        assert code == EXIT_CONFIG_ERROR

    def test_help_exits_cleanly(self, capsys):
        """--help prints usage and returns 0."""
        code, out, _ = run(capsys, "--help")
        assert code == EXIT_OK
        assert "critical-terms" in out

    def test_computation_error(self, capsys):
        """A row beyond the solved order exits 1 with a structured error."""
        code, out, err = run(capsys, "critical", "--order", "5", "--rows", "7")
        assert code == EXIT_COMPUTATION_ERROR
        assert out == ""
        payload = json.loads(err)
        assert payload["error"] == "RowOutOfRangeError"
        assert payload["context"] == {"row": 7, "N": 5}

    def test_breakdown_reports_boundary(self, capsys):
        """Closed forms outside their validity region name the violated condition."""
        code, _, err = run(capsys, "solution", "--x0", "0.25", "--u0", "0.5")
        assert code == EXIT_COMPUTATION_ERROR
        payload = json.loads(err)
        assert payload["error"] == "BreakdownError"
        assert payload["context"]["condition"] == "u0 > (1 - 4*x0)/4"

    def test_unwritable_out_path(self, capsys, tmp_path):
        """An --out path in a missing directory is a configuration error naming the path."""
        target = tmp_path / "missing" / "coeffs.csv"
        code, out, err = run(capsys, "coeffs", "--count", "3", "--out", str(target))
        assert code == EXIT_CONFIG_ERROR
        assert out == ""
        payload = json.loads(err)
        assert payload["error"] == "ConfigError"
        assert payload["context"]["path"] == str(target)

    def test_unwritable_out_dir(self, capsys, tmp_path):
        """A dataset directory below a regular file is a configuration error."""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        code, _, err = run(capsys, "dataset", "fig3-terms", "--out-dir", str(blocker / "sub"), "--order", "4")
        assert code == EXIT_CONFIG_ERROR
        payload = json.loads(err)
        assert payload["error"] == "ConfigError"
        assert str(blocker) in payload["context"]["path"]

    @pytest.mark.parametrize(
        "argv",
        [
            ["coeffs", "--count", "12"],
            ["critical", "--order", "12", "--format", "json"],
            ["critical-terms", "--order", "10"],
        ],
    )
    def test_output_is_deterministic(self, capsys, argv):
        """Two runs with the same arguments print identical bytes."""
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first[0] == EXIT_OK
        assert first == second


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


class TestCommands:
    """Output of each subcommand."""

    def test_coeffs_csv(self, capsys):
        """coeffs --count 4 lists B_0 … B_3 with b_n."""
        code, out, _ = run(capsys, "coeffs", "--count", "4")
        assert code == EXIT_OK
        assert csv_rows(out) == [
            ["n", "B_n", "b_n"],
            ["0", "1", "1"],
            ["1", "1/2", "1"],
            ["2", "1/6", "2"],
            ["3", "7/144", "7"],
        ]

    def test_coeffs_json(self, capsys):
        """JSON output carries the config and the exact values as strings."""
        code, out, _ = run(capsys, "coeffs", "--count", "7", "--format", "json")
        document = json.loads(out)
        assert code == EXIT_OK
        assert document["config"]["command"] == "coeffs"
        assert [row["b"] for row in document["data"]] == ["1", "1", "2", "7", "38", "296", "3132"]

    def test_critical_row(self, capsys):
        """critical --order 5 --rows 5 gives the five-term partial sums."""
        _, out, _ = run(capsys, "critical", "--order", "5", "--rows", "5")
        header, row = csv_rows(out)
        values = dict(zip(header, row))
        assert values["zc"] == "0.91458333"
        assert values["xc"] == "0.60138889"

    def test_critical_env_precision(self, capsys, monkeypatch):
        """The environment precision applies to the decimal columns."""
        monkeypatch.setenv(ENV_FLOAT_DIGITS, "3")
        _, out, _ = run(capsys, "critical", "--order", "3", "--rows", "3")
        header, row = csv_rows(out)
        assert dict(zip(header, row))["zc"] == "0.917"

    def test_critical_terms(self, capsys):
        """critical-terms lists n = 2 … N."""
        _, out, _ = run(capsys, "critical-terms", "--order", "8")
        rows = csv_rows(out)
        assert rows[0] == ["n", "zc_ratio", "xc_ratio", "zc_in_band", "xc_in_band"]
        assert [r[0] for r in rows[1:]] == [str(n) for n in range(2, 9)]

    def test_separatrix(self, capsys):
        """separatrix samples the requested number of points."""
        _, out, _ = run(capsys, "separatrix", "--max-order", "2", "--points", "4")
        rows = csv_rows(out)
        assert rows[0] == ["z", "x_1", "u_1", "x_2", "u_2"]
        assert len(rows) == 5

    def test_solution_json(self, capsys):
        """solution starts at the initial conditions."""
        _, out, _ = run(
            capsys, "solution", "--method", "rg", "--x0", "0.4", "--u0", "-0.3", "--points", "3", "--format", "json"
        )
        data = json.loads(out)["data"]
        assert len(data) == 3
        assert data[0]["t"] == 0.0

    def test_fate(self, capsys):
        """fate reports capture above the threshold."""
        _, out, _ = run(capsys, "fate", "--x0", "0.7", "--u0", "-0.49")
        header, row = csv_rows(out)
        assert dict(zip(header, row))["fate"] == "capture"

    def test_trace_separatrix_json(self, capsys):
        """trace-separatrix returns the crossing point."""
        _, out, _ = run(capsys, "trace-separatrix", "--format", "json")
        data = json.loads(out)["data"]
        assert data["xc"] == pytest.approx(0.597777, abs=2e-6)

    def test_portrait(self, capsys):
        """portrait emits one row per cell."""
        _, out, _ = run(
            capsys, "portrait", "--x-range", "0.3:1.0", "--u-range=-2:0", "--resolution", "2:2"
        )
        rows = csv_rows(out)
        assert rows[0] == ["x0", "u0", "fate", "t_event"]
        assert len(rows) == 5

    def test_domb_sykes_json(self, capsys):
        """domb-sykes --format json returns the fitted offset and growth."""
        _, out, _ = run(capsys, "domb-sykes", "--count", "41", "--delta", "-0.8", "--format", "json")
        data = json.loads(out)["data"]
        assert data["delta"] == -0.8
        assert 4.64 <= data["growth"] <= 4.67

    def test_domb_sykes_csv(self, capsys):
        """CSV output lists ratios with s_n where defined."""
        _, out, _ = run(capsys, "domb-sykes", "--count", "20")
        rows = csv_rows(out)
        assert rows[0] == ["n", "inv_n", "inv_n_minus_delta", "ratio", "s_n", "s_fit_residual"]
        assert len(rows) == 20
        assert rows[-1][-2:] == ["", ""]

    def test_domb_sykes_csv_fit_summary(self, capsys):
        """The CSV carries the fitted offset and growth rate matching the JSON document."""
        argv = ("domb-sykes", "--count", "41", "--delta", "-0.8")
        _, out, _ = run(capsys, *argv)
        _, document, _ = run(capsys, *argv, "--format", "json")
        data = json.loads(document)["data"]
        (note,) = csv_notes(out)
        assert note.startswith("fit ")
        fields = dict(item.split("=") for item in note[len("fit ") :].split(","))
        assert float(fields["delta"]) == -0.8
        assert float(fields["growth"]) == pytest.approx(data["growth"], rel=1e-7)
        assert float(fields["fitted_delta"]) == pytest.approx(data["fitted_delta"], rel=1e-7)
        assert fields["window"] == "{}:{}".format(*data["fit_window"])
        residuals = [row[-1] for row in csv_rows(out)[1:] if row[-1]]
        assert len(residuals) == len(data["fit_residuals"])

    def test_dataset(self, capsys, tmp_path):
        """dataset lists the files it wrote."""
        code, out, _ = run(capsys, "dataset", "fig3-terms", "--out-dir", str(tmp_path), "--order", "6")
        assert code == EXIT_OK
        rows = csv_rows(out)
        assert rows[0] == ["path"]
        assert (tmp_path / "fig3-terms.csv").exists()

    def test_out_path(self, capsys, tmp_path):
        """--out writes to a file instead of stdout."""
        target = tmp_path / "coeffs.csv"
        code, out, _ = run(capsys, "coeffs", "--count", "3", "--out", str(target))
        assert code == EXIT_OK
        assert out == ""
        assert target.read_bytes().count(b"\r\n") == 5
