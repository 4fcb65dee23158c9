"""Harness and CLI checks on short runs: determinism of emitted files, the
time-step guard, validity gating, breach records, output formats, and exit
codes."""

import numpy as np
import pytest

from stefanetc import cli, config, harness, trigger
from stefanetc.errors import ConfigurationError
from conftest import variant_text


@pytest.fixture(scope="module")
def short_text():
    text = config.default_config_text()
    return variant_text(text, [("horizon = auto", "horizon = 300.0")])


@pytest.fixture(scope="module")
def short_result(short_text):
    return harness.run_scenario(config.parse_config_text(short_text))


class TestRunScenario:
    def test_series_shapes_consistent(self, short_result):
        series = short_result.series
        n = series["t"].size
        assert n == short_result.summary["steps"]
        for col in harness.SERIES_COLUMNS:
            assert series[col].size == n

    def test_determinism(self, short_text):
        a = harness.run_scenario(config.parse_config_text(short_text))
        b = harness.run_scenario(config.parse_config_text(short_text))
        for col in harness.SERIES_COLUMNS:
            assert np.array_equal(a.series[col], b.series[col]), col

    def test_dt_guard_reports_tau(self, default_text):
        bad = variant_text(default_text,
                           [("allow_coarse_dt = true", "allow_coarse_dt = false")])
        with pytest.raises(ConfigurationError, match="tau=0.68"):
            harness.run_scenario(config.parse_config_text(bad))

    def test_validity_gate(self, default_text):
        # Observer bound below the plant bound fails the sandwich ordering.
        bad = variant_text(default_text,
                           [("That_amplitude = 10.0", "That_amplitude = 0.5")])
        with pytest.raises(ConfigurationError, match="unsafe"):
            harness.run_scenario(config.parse_config_text(bad))

    def test_breach_produces_record_not_exception(self, default_text):
        # An interface started essentially at the setpoint drives the held
        # input negative at the first update: structured breach, exit intact.
        text = variant_text(default_text, [
            ("s0 = 0.1", "s0 = 2.1"),
            ("setpoint = 2.0", "setpoint = 2.05"),
            ("unsafe = false", "unsafe = true"),
            ("horizon = auto", "horizon = 100.0"),
        ])
        result = harness.run_scenario(config.parse_config_text(text))
        assert result.breach is not None
        assert result.breach.condition == "q_positive"
        assert result.summary["breach"]["condition"] == "q_positive"

    def test_summary_recomputable_from_series(self, short_result):
        s = short_result.series["s"]
        assert short_result.summary["final_interface_gap"] == pytest.approx(
            abs(s[-1] - 2.0), rel=1e-12)
        lo, mean, hi = trigger.dwell_stats(short_result.events)
        assert short_result.summary["dwell_mean"] == pytest.approx(mean) \
            or (np.isnan(mean) and np.isnan(short_result.summary["dwell_mean"]))


class TestCompare:
    def test_requires_shared_physics(self, default_text):
        a = config.parse_config_text(default_text)
        b = config.parse_config_text(
            variant_text(default_text, [("L = 3.0", "L = 2.5")]))
        with pytest.raises(ConfigurationError, match="identical"):
            harness.compare_scenarios([a, b])

    def test_empty_list(self):
        assert harness.compare_scenarios([]) == []


class TestEmitOutputs:
    def test_files_written_and_stable(self, short_result, tmp_path):
        first = harness.emit_outputs(short_result, tmp_path / "a")
        second = harness.emit_outputs(short_result, tmp_path / "b")
        names = sorted(p.name for p in first)
        assert names == ["config.cfg", "derivation_report.txt", "events.csv",
                         "series.csv", "summary.json"]
        for pa, pb in zip(first, second):
            assert pa.read_bytes() == pb.read_bytes()

    def test_series_csv_format(self, short_result, tmp_path):
        harness.emit_outputs(short_result, tmp_path)
        raw = (tmp_path / "series.csv").read_bytes()
        assert b"\r\n" in raw
        header = raw.split(b"\r\n", 1)[0].decode()
        assert header == ",".join(harness.SERIES_COLUMNS)

    def test_empty_result_headers_only(self, short_result, tmp_path):
        empty = harness.ScenarioResult(
            config=short_result.config, derived=short_result.derived,
            series={c: np.array([]) for c in harness.SERIES_COLUMNS},
            events=[], summary=dict(short_result.summary))
        harness.emit_outputs(empty, tmp_path / "empty")
        lines = (tmp_path / "empty" / "series.csv").read_bytes().split(b"\r\n")
        assert lines[0].decode() == ",".join(harness.SERIES_COLUMNS)
        assert lines[1] == b""

    def test_config_round_trip_through_emit(self, short_result, tmp_path):
        harness.emit_outputs(short_result, tmp_path)
        again = config.parse_config(tmp_path / "config.cfg")
        assert again.raw == short_result.config.raw


class TestDerivationReport:
    def test_lists_constants_and_epsilon_note(self, short_result):
        text = harness.derivation_report(short_result.config,
                                         short_result.derived)
        assert "tau" in text and "Upsilon" in text and "mu3" in text
        # The shipped epsilon exceeds the tightest sufficient bound; the
        # report says so instead of failing.
        assert "NOTE: configured epsilon exceeds" in text


class TestCli:
    def test_run_short_horizon(self, short_text, tmp_path):
        cfg_path = tmp_path / "short.cfg"
        cfg_path.write_text(short_text)
        code = cli.main(["run", "--config", str(cfg_path),
                         "--output", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "summary.json").is_file()

    def test_configuration_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[physical]\nk = -1\n")
        assert cli.main(["validate", "--config", str(bad)]) == 1

    def test_breach_exit_code(self, default_text, tmp_path):
        text = variant_text(default_text, [
            ("s0 = 0.1", "s0 = 2.1"),
            ("setpoint = 2.0", "setpoint = 2.05"),
            ("unsafe = false", "unsafe = true"),
            ("horizon = auto", "horizon = 100.0"),
        ])
        cfg_path = tmp_path / "breach.cfg"
        cfg_path.write_text(text)
        code = cli.main(["run", "--config", str(cfg_path),
                         "--output", str(tmp_path / "out")])
        assert code == 2

    def test_derive_prints_report(self, capsys):
        assert cli.main(["derive"]) == 0
        out = capsys.readouterr().out
        assert "derivation report" in out
        assert "tau" in out

    def test_validate_default_passes(self, capsys):
        assert cli.main(["validate"]) == 0
        assert "overall: PASS" in capsys.readouterr().out

    def test_sweep_unknown_key(self):
        assert cli.main(["sweep", "--param", "trigger.zeta",
                         "--values", "1"]) == 1

    def test_output_root_env(self, short_text, tmp_path, monkeypatch):
        monkeypatch.setenv("STEFANETC_OUTPUT_ROOT", str(tmp_path))
        cfg_path = tmp_path / "short.cfg"
        cfg_path.write_text(short_text)
        assert cli.main(["run", "--config", str(cfg_path)]) == 0
        assert (tmp_path / "out" / "series.csv").is_file()
