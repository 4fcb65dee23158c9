"""Configuration schema checks: strictness on unknown names, typed parsing,
auto bounds, and serialize/parse round trips."""

import numpy as np
import pytest

from stefanetc import config
from stefanetc.errors import ConfigurationError
from conftest import variant_text


class TestDefaults:
    def test_default_parses(self, default_cfg):
        assert default_cfg.scenario.kind == "event_triggered"
        assert default_cfg.scheme.n == 21
        assert default_cfg.scheme.dt == 0.5
        assert default_cfg.ctrl.s_r == 2.0
        assert default_cfg.init.s0 == 0.1
        assert default_cfg.phys.alpha == pytest.approx(1.170088288479949e-3)

    def test_kind_switch(self):
        cfg = config.default_config("continuous")
        assert cfg.scenario.kind == "continuous"

    def test_auto_bounds_from_linear_profiles(self, default_cfg):
        assert default_cfg.init.H == pytest.approx(1.0 / 0.1, rel=1e-9)
        assert default_cfg.init.H_hat_l == pytest.approx(10.0 / 0.1, rel=1e-9)
        assert default_cfg.init.H_hat_u == pytest.approx(10.0 / 0.1, rel=1e-9)


class TestStrictness:
    def test_unknown_section(self, default_text):
        with pytest.raises(ConfigurationError, match="unknown config section"):
            config.parse_config_text(default_text + "\n[plotting]\nstyle = x\n")

    def test_unknown_key(self, default_text):
        bad = variant_text(default_text, [("eta = 1.325e-2", "etaa = 1.325e-2")])
        with pytest.raises(ConfigurationError, match="unknown key"):
            config.parse_config_text(bad)

    def test_missing_required_section(self, default_text):
        bad = variant_text(default_text, [("[trigger]", "[scheme]")])
        with pytest.raises(ConfigurationError):
            config.parse_config_text(bad)

    def test_bad_number(self, default_text):
        bad = variant_text(default_text, [("dt = 0.5", "dt = fast")])
        with pytest.raises(ConfigurationError, match="not a number"):
            config.parse_config_text(bad)

    def test_bad_boolean(self, default_text):
        bad = variant_text(default_text, [("unsafe = false", "unsafe = maybe")])
        with pytest.raises(ConfigurationError, match="not a boolean"):
            config.parse_config_text(bad)

    def test_bad_kind(self, default_text):
        bad = variant_text(default_text,
                           [("kind = event_triggered", "kind = adaptive")])
        with pytest.raises(ConfigurationError, match="scenario.kind"):
            config.parse_config_text(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            config.parse_config(tmp_path / "nope.cfg")


class TestProfiles:
    def test_samples_kind(self, default_text):
        text = variant_text(default_text, [
            ("T0_kind = linear", "T0_kind = samples"),
            ("T0_amplitude = 1.0", "T0_samples = 38.0 37.5 37.0"),
        ])
        cfg = config.parse_config_text(text)
        assert cfg.init.T0[0] == pytest.approx(38.0)
        assert cfg.init.T0[-1] == pytest.approx(37.0)

    def test_samples_need_three_values(self, default_text):
        text = variant_text(default_text, [
            ("T0_kind = linear", "T0_kind = samples"),
            ("T0_amplitude = 1.0", "T0_samples = 38.0 37.0"),
        ])
        with pytest.raises(ConfigurationError, match="3 values"):
            config.parse_config_text(text)


class TestRoundTrip:
    def test_serialize_parse_is_semantic_identity(self, default_cfg):
        text = config.serialize_config(default_cfg)
        again = config.parse_config_text(text)
        assert again.raw == default_cfg.raw
        assert again.scheme == default_cfg.scheme
        assert again.ctrl == default_cfg.ctrl
        assert again.trig == default_cfg.trig
        assert np.array_equal(again.init.T0, default_cfg.init.T0)
