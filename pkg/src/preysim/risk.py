"""Risk scoring for a pursued agent.

A distance stream feeds three sliding windows: an inverse-distance score
and a sound-pressure proxy sampled every second, and an approach-velocity
estimate sampled every two seconds. Each full window yields a linear
slope; positive slopes are scaled by per-factor normalization gains and
saturate at 1, so every factor lives in [0, 1]. Battery depletion adds a
fourth, level-based factor. The weighted factor total is compared against
escalating thresholds to select a response behavior.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, ContractViolation
from .model import BatteryModel

_CADENCE_EPS = 1e-6


class SlopeMode(Enum):
    """Denominator used when turning a sample window into a slope.

    STANDARD is the least-squares slope: covariance of (time, value)
    over the time variance. VALUE_NORMALIZED divides the covariance by
    the value variance instead; it is kept selectable for comparison
    runs but blows up for near-constant windows (guarded to 0), so
    STANDARD is the default everywhere.
    """

    STANDARD = "standard"
    VALUE_NORMALIZED = "value-normalized"


class BehaviorCommand(Enum):
    """Response selected by the trigger mechanism."""

    CONTINUE_TASK = "continue_task"
    FLEE = "flee"
    PROTEAN = "protean"
    REFUGE = "refuge"


class SampleWindow:
    """Fixed-capacity buffer of (time, value) samples, oldest evicted first."""

    def __init__(self, capacity: int = 5):
        if capacity < 2:
            raise ValueError("window capacity must be at least 2")
        self.capacity = capacity
        self._entries: deque[tuple[float, float]] = deque(maxlen=capacity)

    def push(self, t: float, value: float) -> None:
        if self._entries and t <= self._entries[-1][0]:
            raise ContractViolation("sample timestamps must be strictly increasing")
        self._entries.append((t, value))

    @property
    def full(self) -> bool:
        return len(self._entries) == self.capacity

    def __len__(self) -> int:
        return len(self._entries)

    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self._entries)

    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self._entries)


@dataclass(frozen=True)
class RiskCoefficients:
    """Per-factor normalization gains applied to positive window slopes."""

    distance: float = 1.0 / 14.0
    sound: float = 1.0 / 8.0
    velocity: float = 1.0 / 4.0
    battery: float = 1.0 / 100.0

    def __post_init__(self) -> None:
        for name in ("distance", "sound", "velocity", "battery"):
            if getattr(self, name) <= 0:
                raise ValueError(f"coefficient {name} must be positive")


@dataclass(frozen=True)
class RiskThresholds:
    """Escalating trigger levels; flee <= protean <= refuge."""

    flee: float = 0.2
    protean: float = 0.3
    refuge: float = 0.4

    def __post_init__(self) -> None:
        if not self.flee <= self.protean <= self.refuge:
            raise ValueError("thresholds must satisfy flee <= protean <= refuge")


# Named threshold profiles. In `literal` the protean and refuge levels sit
# far above the reachable band (factors saturate at 1 and the default
# weights sum to 1), so only fleeing can ever trigger; it is kept for
# comparison runs. `normalized` keeps all three behaviors reachable and is
# the default.
THRESHOLD_PROFILES: dict[str, RiskThresholds] = {
    "normalized": RiskThresholds(0.2, 0.3, 0.4),
    "literal": RiskThresholds(0.2, 30.0, 40.0),
}


@dataclass(frozen=True)
class RiskBreakdown:
    """One evaluation of the four factor scores and their weighted total."""

    distance: float
    sound: float
    velocity: float
    battery: float
    total: float


@dataclass(frozen=True)
class RiskProfile:
    """Complete risk-engine parameterization for a run."""

    coefficients: RiskCoefficients = RiskCoefficients()
    weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    thresholds: RiskThresholds = RiskThresholds()
    slope_mode: SlopeMode = SlopeMode.STANDARD

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be >= 0")


def distance_score(distance: float) -> float:
    """Inverse-distance threat score, 100 / d."""
    if distance <= 0:
        raise ValueError("distance must be positive")
    return 100.0 / distance


def sound_pressure(distance: float) -> float:
    """Point-source sound-pressure proxy, 60 / d (no reflections, no occlusion)."""
    if distance <= 0:
        raise ValueError("distance must be positive")
    return 60.0 / distance


def relative_velocity(d_prev: float, d_curr: float) -> float:
    """Mean separation rate over the 2 s sampling period; negative while closing."""
    return (d_curr - d_prev) / 2.0


def battery_depletion(t: float, battery: BatteryModel) -> float:
    """Percentage of battery consumed at time t, clamped to [0, 100]."""
    if t < 0:
        raise ValueError("t must be >= 0")
    raw = 100.0 - (battery.capacity - t * battery.discharge_rate) / 6.0
    return min(max(raw, 0.0), 100.0)


def window_slope(window: SampleWindow, mode: SlopeMode = SlopeMode.STANDARD) -> float | None:
    """Linear slope of a full sample window, or None while it is still filling.

    VALUE_NORMALIZED uses the value variance as the denominator and
    returns 0 for constant windows, where that ratio is undefined.
    """
    if not window.full:
        return None
    times = window.times()
    values = window.values()
    mean_time = sum(times) / len(times)
    mean_value = sum(values) / len(values)
    covariance = sum((v - mean_value) * (t - mean_time) for t, v in zip(times, values))
    if mode is SlopeMode.STANDARD:
        denominator = sum((t - mean_time) ** 2 for t in times)
    else:
        denominator = sum((v - mean_value) ** 2 for v in values)
        if denominator == 0.0:
            return 0.0
    return covariance / denominator


def rectified_risk(slope: float, coefficient: float) -> float:
    """Scale a positive slope into [0, 1]; non-positive slopes carry no risk.

    The gain is a normalization coefficient, so the result saturates at 1
    for slopes steeper than the gain's nominal range.
    """
    if coefficient <= 0:
        raise ValueError("coefficient must be positive")
    if slope <= 0:
        return 0.0
    return min(coefficient * slope, 1.0)


def battery_risk(level: float, coefficient: float) -> float:
    """Battery factor: gain times depletion percentage, clamped to [0, 1]."""
    if coefficient <= 0:
        raise ValueError("coefficient must be positive")
    return min(max(coefficient * level, 0.0), 1.0)


def total_risk(factors, weights) -> float:
    """Weighted sum of factor scores."""
    if len(factors) != len(weights):
        raise ConfigError(f"{len(factors)} factors but {len(weights)} weights")
    return sum(w * r for w, r in zip(weights, factors))


def select_response(total: float, thresholds: RiskThresholds, preservation: str) -> BehaviorCommand:
    """Map a total risk level to a response under a preservation configuration.

    Configuration A may select any behavior (the highest met threshold
    wins), B only ever flees, and C never reacts.
    """
    if preservation == "C":
        return BehaviorCommand.CONTINUE_TASK
    if preservation == "B":
        return BehaviorCommand.FLEE if total >= thresholds.flee else BehaviorCommand.CONTINUE_TASK
    if preservation == "A":
        if total >= thresholds.refuge:
            return BehaviorCommand.REFUGE
        if total >= thresholds.protean:
            return BehaviorCommand.PROTEAN
        if total >= thresholds.flee:
            return BehaviorCommand.FLEE
        return BehaviorCommand.CONTINUE_TASK
    raise ValueError(f"unknown preservation configuration {preservation!r}")


class RiskEngine:
    """Streams per-step world samples and emits breakdowns at score cadence.

    One instance serves one episode. The score and sound windows sample
    every `score_period` seconds; the approach-velocity window samples
    every `velocity_period` seconds from consecutive period-apart distance
    samples, so it is the last to fill. `ingest` returns a breakdown for
    each score-cadence sample taken once every window is full, and None
    otherwise.
    """

    def __init__(
        self,
        coefficients: RiskCoefficients = RiskCoefficients(),
        weights: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25),
        slope_mode: SlopeMode = SlopeMode.STANDARD,
        *,
        window_capacity: int = 5,
        score_period: float = 1.0,
        velocity_period: float = 2.0,
    ):
        if score_period <= 0 or velocity_period <= 0:
            raise ValueError("sampling periods must be positive")
        self.coefficients = coefficients
        self.weights = tuple(weights)
        self.slope_mode = slope_mode
        self.score_period = score_period
        self.velocity_period = velocity_period
        self._score_window = SampleWindow(window_capacity)
        self._sound_window = SampleWindow(window_capacity)
        self._velocity_window = SampleWindow(window_capacity)
        self._last_velocity_sample: tuple[float, float] | None = None
        self._next_score_t = 0.0
        self._next_velocity_t = 0.0
        self._last_t: float | None = None

    @classmethod
    def from_profile(cls, profile: RiskProfile) -> "RiskEngine":
        return cls(profile.coefficients, profile.weights, profile.slope_mode)

    def ingest(self, t: float, distance: float, battery_level: float) -> RiskBreakdown | None:
        """Feed one step's samples; returns a breakdown when one is due."""
        if self._last_t is not None and t <= self._last_t:
            raise ContractViolation("ingest times must be strictly increasing")
        self._last_t = t

        if t >= self._next_velocity_t - _CADENCE_EPS:
            self._next_velocity_t += self.velocity_period
            if self._last_velocity_sample is not None:
                _, previous = self._last_velocity_sample
                self._velocity_window.push(t, relative_velocity(previous, distance))
            self._last_velocity_sample = (t, distance)

        scored = False
        if t >= self._next_score_t - _CADENCE_EPS:
            self._next_score_t += self.score_period
            self._score_window.push(t, distance_score(distance))
            self._sound_window.push(t, sound_pressure(distance))
            scored = True

        if not scored:
            return None
        if not (self._score_window.full and self._sound_window.full and self._velocity_window.full):
            return None
        return self._breakdown(battery_level)

    def _breakdown(self, battery_level: float) -> RiskBreakdown:
        gains = self.coefficients
        factor_distance = rectified_risk(window_slope(self._score_window, self.slope_mode), gains.distance)
        factor_sound = rectified_risk(window_slope(self._sound_window, self.slope_mode), gains.sound)
        factor_velocity = rectified_risk(window_slope(self._velocity_window, self.slope_mode), gains.velocity)
        factor_battery = battery_risk(battery_level, gains.battery)
        factors = (factor_distance, factor_sound, factor_velocity, factor_battery)
        return RiskBreakdown(*factors, total=total_risk(factors, self.weights))
