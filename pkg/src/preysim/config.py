"""Run-configuration files: YAML with full defaults and strict key checking.

Every key is optional and defaults to the values baked into the library;
unknown keys are rejected so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from .behaviors import DroneMode, ProteanParams
from .episode import EpisodeConfig
from .errors import ConfigError
from .model import BatteryModel, SimParams
from .risk import (
    THRESHOLD_PROFILES,
    RiskCoefficients,
    RiskProfile,
    RiskThresholds,
    SlopeMode,
)


@dataclass(frozen=True)
class ArenaParams:
    """Scenario-generation bounds and separation constraints."""

    side: float = 40.0
    min_separation: float = 10.0
    min_goal_distance: float = 10.0

    def __post_init__(self) -> None:
        if self.side <= 0:
            raise ValueError("arena side must be positive")
        if self.min_separation < 0 or self.min_goal_distance < 0:
            raise ValueError("separation constraints must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    """Materialized run configuration; everything outside the CLI flags."""

    params: SimParams = SimParams()
    battery: BatteryModel = BatteryModel()
    risk: RiskProfile = RiskProfile()
    protean: ProteanParams = ProteanParams()
    arena: ArenaParams = ArenaParams()
    dwell: float = 5.0
    giveup_time: float = 40.0


_SIM_KEYS = (
    "dt",
    "max_time",
    "rover_speed",
    "rover_turn_rate",
    "drone_speed",
    "drone_turn_rate",
    "capture_distance",
    "goal_radius",
    "drone_cruise_altitude",
    "heading_tolerance",
)
_BATTERY_KEYS = ("capacity", "discharge_rate")
_COEFFICIENT_KEYS = ("distance", "sound", "velocity", "battery")
_THRESHOLD_KEYS = ("flee", "protean", "refuge")
_PROTEAN_KEYS = ("subgoal_distance", "heading_jitter", "arrival_radius")
_ARENA_KEYS = ("side", "min_separation", "min_goal_distance")


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return value

def _check_keys(mapping: dict, allowed, path: str) -> None:
    unknown = [key for key in mapping if key not in allowed]
    if unknown:
        raise ConfigError(f"{path}: unknown key {unknown[0]!r}")


def _number(mapping: dict, key: str, default: float, path: str) -> float:
    if key not in mapping:
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number")
    return float(value)


def _numbers_from(mapping: dict, keys, defaults, path: str) -> dict:
    _check_keys(mapping, keys, path)
    return {key: _number(mapping, key, getattr(defaults, key), path) for key in keys}


def _parse_thresholds(value, path: str) -> RiskThresholds:
    if isinstance(value, str):
        try:
            return THRESHOLD_PROFILES[value]
        except KeyError:
            known = ", ".join(sorted(THRESHOLD_PROFILES))
            raise ConfigError(f"{path}: unknown threshold profile {value!r} (known: {known})") from None
    mapping = _require_mapping(value, path)
    fields = _numbers_from(mapping, _THRESHOLD_KEYS, RiskThresholds(), path)
    try:
        return RiskThresholds(**fields)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_slope_mode(value, path: str) -> SlopeMode:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string")
    for mode in SlopeMode:
        if value == mode.value:
            return mode
    known = ", ".join(mode.value for mode in SlopeMode)
    raise ConfigError(f"{path}: unknown slope mode {value!r} (known: {known})")


def _parse_weights(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise ConfigError(f"{path}: expected a list of 4 weights")
    weights = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{path}[{i}]: expected a number")
        weights.append(float(item))
    return tuple(weights)


def parse_run_config(data: dict | None) -> RunConfig:
    """Build a RunConfig from a parsed YAML mapping (None means all defaults)."""
    if data is None:
        return RunConfig()
    root = _require_mapping(data, "configuration")
    _check_keys(root, ("sim", "battery", "risk", "behavior", "arena", "drone"), "configuration")
    defaults = RunConfig()

    try:
        params = SimParams(**_numbers_from(_require_mapping(root.get("sim", {}), "sim"), _SIM_KEYS, defaults.params, "sim")) \
            if "sim" in root else defaults.params
    except ValueError as exc:
        raise ConfigError(f"sim: {exc}") from None

    try:
        battery = BatteryModel(**_numbers_from(_require_mapping(root.get("battery", {}), "battery"), _BATTERY_KEYS, defaults.battery, "battery")) \
            if "battery" in root else defaults.battery
    except ValueError as exc:
        raise ConfigError(f"battery: {exc}") from None

    risk = defaults.risk
    if "risk" in root:
        section = _require_mapping(root["risk"], "risk")
        _check_keys(section, ("slope_mode", "thresholds", "coefficients", "weights"), "risk")
        slope_mode = _parse_slope_mode(section["slope_mode"], "risk.slope_mode") if "slope_mode" in section else defaults.risk.slope_mode
        thresholds = _parse_thresholds(section["thresholds"], "risk.thresholds") if "thresholds" in section else defaults.risk.thresholds
        coefficients = defaults.risk.coefficients
        if "coefficients" in section:
            fields = _numbers_from(
                _require_mapping(section["coefficients"], "risk.coefficients"),
                _COEFFICIENT_KEYS,
                defaults.risk.coefficients,
                "risk.coefficients",
            )
            try:
                coefficients = RiskCoefficients(**fields)
            except ValueError as exc:
                raise ConfigError(f"risk.coefficients: {exc}") from None
        weights = _parse_weights(section["weights"], "risk.weights") if "weights" in section else defaults.risk.weights
        try:
            risk = RiskProfile(coefficients=coefficients, weights=weights, thresholds=thresholds, slope_mode=slope_mode)
        except ValueError as exc:
            raise ConfigError(f"risk: {exc}") from None

    protean = defaults.protean
    dwell = defaults.dwell
    if "behavior" in root:
        section = _require_mapping(root["behavior"], "behavior")
        _check_keys(section, ("dwell", "protean"), "behavior")
        dwell = _number(section, "dwell", defaults.dwell, "behavior")
        if dwell < 0:
            raise ConfigError("behavior.dwell: must be >= 0")
        if "protean" in section:
            fields = _numbers_from(
                _require_mapping(section["protean"], "behavior.protean"),
                _PROTEAN_KEYS,
                defaults.protean,
                "behavior.protean",
            )
            try:
                protean = ProteanParams(**fields)
            except ValueError as exc:
                raise ConfigError(f"behavior.protean: {exc}") from None

    try:
        arena = ArenaParams(**_numbers_from(_require_mapping(root.get("arena", {}), "arena"), _ARENA_KEYS, defaults.arena, "arena")) \
            if "arena" in root else defaults.arena
    except ValueError as exc:
        raise ConfigError(f"arena: {exc}") from None

    giveup_time = defaults.giveup_time
    if "drone" in root:
        section = _require_mapping(root["drone"], "drone")
        _check_keys(section, ("giveup_time",), "drone")
        giveup_time = _number(section, "giveup_time", defaults.giveup_time, "drone")
        if giveup_time <= 0:
            raise ConfigError("drone.giveup_time: must be positive")

    return RunConfig(
        params=params,
        battery=battery,
        risk=risk,
        protean=protean,
        arena=arena,
        dwell=dwell,
        giveup_time=giveup_time,
    )


def load_run_config(path: str | None) -> RunConfig:
    """Load a YAML run configuration; None loads the built-in defaults."""
    if path is None:
        return RunConfig()
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML ({exc})") from None
    return parse_run_config(data)


def episode_config(
    run: RunConfig,
    preservation: str,
    mode_label: str,
    record_trace: bool = False,
) -> EpisodeConfig:
    """Assemble the per-episode configuration for one matrix cell."""
    if mode_label not in ("persistent", "cautious"):
        raise ConfigError(f"mode must be 'persistent' or 'cautious', not {mode_label!r}")
    drone_mode = DroneMode(cautious=(mode_label == "cautious"), giveup_time=run.giveup_time)
    return EpisodeConfig(
        preservation=preservation,
        drone_mode=drone_mode,
        risk=run.risk,
        params=run.params,
        battery=run.battery,
        protean=run.protean,
        dwell=run.dwell,
        record_trace=record_trace,
    )
