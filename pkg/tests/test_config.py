"""Run-configuration parsing tests."""

import math

import pytest

from preysim.config import ArenaParams, RunConfig, episode_config, load_run_config, parse_run_config
from preysim.errors import ConfigError
from preysim.risk import RiskThresholds, SlopeMode


class TestDefaults:
    def test_no_file_means_defaults(self):
        run = load_run_config(None)
        assert run == RunConfig()
        assert run.params.dt == 0.05
        assert run.params.max_time == 80.0
        assert run.params.rover_speed == 0.5
        assert run.params.drone_turn_rate == 0.4
        assert run.params.capture_distance == 0.15
        assert run.battery.capacity == 600.0
        assert run.risk.thresholds == RiskThresholds(0.2, 0.3, 0.4)
        assert run.risk.slope_mode is SlopeMode.STANDARD
        assert run.risk.coefficients.distance == pytest.approx(1 / 14)
        assert run.risk.weights == (0.25, 0.25, 0.25, 0.25)
        assert run.protean.subgoal_distance == 5.0
        assert run.protean.heading_jitter == pytest.approx(math.pi / 4)
        assert run.arena == ArenaParams(40.0, 10.0, 10.0)
        assert run.dwell == 5.0
        assert run.giveup_time == 40.0

    def test_empty_document_means_defaults(self):
        assert parse_run_config(None) == RunConfig()


class TestParsing:
    def test_partial_overrides_keep_other_defaults(self):
        run = parse_run_config({"sim": {"dt": 0.1}, "behavior": {"dwell": 2.0}})
        assert run.params.dt == 0.1
        assert run.params.max_time == 80.0
        assert run.dwell == 2.0
        assert run.protean.subgoal_distance == 5.0

    def test_named_threshold_profile(self):
        run = parse_run_config({"risk": {"thresholds": "literal"}})
        assert run.risk.thresholds == RiskThresholds(0.2, 30.0, 40.0)

    def test_explicit_thresholds(self):
        run = parse_run_config({"risk": {"thresholds": {"flee": 0.1, "protean": 0.2, "refuge": 0.9}}})
        assert run.risk.thresholds == RiskThresholds(0.1, 0.2, 0.9)

    def test_slope_mode(self):
        run = parse_run_config({"risk": {"slope_mode": "value-normalized"}})
        assert run.risk.slope_mode is SlopeMode.VALUE_NORMALIZED

    def test_weights_and_coefficients(self):
        run = parse_run_config({"risk": {"weights": [0.4, 0.3, 0.2, 0.1],
                                         "coefficients": {"distance": 0.5}}})
        assert run.risk.weights == (0.4, 0.3, 0.2, 0.1)
        assert run.risk.coefficients.distance == 0.5
        assert run.risk.coefficients.sound == pytest.approx(1 / 8)

    def test_yaml_file_round_trip(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(
            "sim:\n  dt: 0.025\nrisk:\n  thresholds: normalized\narena:\n  side: 60.0\n"
            "drone:\n  giveup_time: 25.0\n"
        )
        run = load_run_config(path)
        assert run.params.dt == 0.025
        assert run.arena.side == 60.0
        assert run.giveup_time == 25.0


class TestRejection:
    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_run_config({"simulation": {}})

    def test_unknown_nested_key_names_path(self):
        with pytest.raises(ConfigError, match="sim"):
            parse_run_config({"sim": {"dtt": 0.1}})
        with pytest.raises(ConfigError, match="risk.coefficients"):
            parse_run_config({"risk": {"coefficients": {"sonic": 1.0}}})

    def test_unknown_threshold_profile(self):
        with pytest.raises(ConfigError, match="threshold profile"):
            parse_run_config({"risk": {"thresholds": "loose"}})

    def test_threshold_ordering_enforced(self):
        with pytest.raises(ConfigError):
            parse_run_config({"risk": {"thresholds": {"flee": 0.9, "protean": 0.2, "refuge": 0.9}}})

    def test_non_numeric_value(self):
        with pytest.raises(ConfigError, match="expected a number"):
            parse_run_config({"sim": {"dt": "fast"}})

    def test_bad_weights_shape(self):
        with pytest.raises(ConfigError, match="weights"):
            parse_run_config({"risk": {"weights": [0.5, 0.5]}})

    def test_bad_slope_mode(self):
        with pytest.raises(ConfigError, match="slope mode"):
            parse_run_config({"risk": {"slope_mode": "cubic"}})

    def test_invalid_sim_values_surface_as_config_errors(self):
        with pytest.raises(ConfigError):
            parse_run_config({"sim": {"dt": -1.0}})

    def test_invalid_yaml_file(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("sim: [unclosed\n")
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_run_config(path)


class TestEpisodeConfigBuilder:
    def test_mode_labels(self):
        run = RunConfig()
        persistent = episode_config(run, "B", "persistent")
        assert persistent.drone_mode.cautious is False
        cautious = episode_config(run, "B", "cautious")
        assert cautious.drone_mode.cautious is True
        assert cautious.drone_mode.giveup_time == 40.0

    def test_giveup_time_propagates(self):
        run = parse_run_config({"drone": {"giveup_time": 12.5}})
        assert episode_config(run, "A", "cautious").drone_mode.giveup_time == 12.5

    def test_bad_mode_label(self):
        with pytest.raises(ConfigError):
            episode_config(RunConfig(), "A", "hovering")
