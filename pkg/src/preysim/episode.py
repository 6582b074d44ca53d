"""Single-encounter simulation.

Scenario generation, the fixed-timestep loop wiring the risk engine to
both controllers, termination detection, and the per-episode record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .behaviors import (
    PERSISTENT,
    DroneMode,
    DronePhase,
    DroneState,
    ProteanParams,
    RoverBehaviorState,
    RoverMode,
    apply_behavior_transition,
    drone_step,
    rover_step,
)
from .errors import GenerationError
from .model import (
    BatteryModel,
    Pose2,
    Position3,
    SimParams,
    WorldState,
    angle_wrap,
    euclidean_distance,
    heading_to,
    horizontal_distance,
)
from .risk import RiskEngine, RiskProfile, battery_depletion, select_response

# One trace row: t, rover x/y, drone x/y/z, rover-drone distance, latest
# total risk (None before the windows fill and for configuration C).
TraceRow = tuple[float, float, float, float, float, float, float, "float | None"]

_PRESERVATION_CODES = {"A": 0, "B": 1, "C": 2}
_MODE_CODES = {"persistent": 0, "cautious": 1}
_BEHAVIOR_NAMES = {
    RoverMode.FLEE: "flee",
    RoverMode.PROTEAN: "protean",
    RoverMode.REFUGE: "refuge",
}


@dataclass(frozen=True)
class Scenario:
    """Initial placement for one encounter, reproducible from its seed."""

    seed: int
    rover_start: Pose2
    drone_start: Position3
    goal: Position3
    refuge: Position3


class EpisodeOutcome(Enum):
    GOAL_REACHED = "goal_reached"
    HIDDEN = "hidden"
    CAPTURED = "captured"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class EpisodeConfig:
    """Everything an episode needs besides the scenario itself."""

    preservation: str = "A"
    drone_mode: DroneMode = PERSISTENT
    risk: RiskProfile = RiskProfile()
    params: SimParams = SimParams()
    battery: BatteryModel = BatteryModel()
    protean: ProteanParams = ProteanParams()
    dwell: float = 5.0
    record_trace: bool = False

    def __post_init__(self) -> None:
        if self.preservation not in _PRESERVATION_CODES:
            raise ValueError(f"preservation must be A, B or C, not {self.preservation!r}")
        if self.dwell < 0:
            raise ValueError("dwell must be >= 0")


@dataclass
class EpisodeRecord:
    """Outcome summary for one episode; the unit of batch aggregation."""

    seed: int
    preservation: str
    mode: str
    outcome: EpisodeOutcome
    t_end: float
    d_initial: float
    d_final: float
    triggered: tuple[str, ...]
    trigger_counts: dict[str, int]
    trace: list[TraceRow] | None = field(default=None, compare=False, repr=False)


def _draw_separated(rng, arena_side, anchor_x, anchor_y, min_distance, max_rejections, label):
    for _ in range(max_rejections):
        x = rng.uniform(0.0, arena_side)
        y = rng.uniform(0.0, arena_side)
        if math.hypot(x - anchor_x, y - anchor_y) >= min_distance:
            return x, y
    raise GenerationError(f"could not place {label} after {max_rejections} draws")


def generate_scenario(
    seed: int,
    arena_side: float = 40.0,
    min_separation: float = 10.0,
    min_goal_distance: float = 10.0,
    max_rejections: int = 10_000,
) -> Scenario:
    """Draw one scenario uniformly over the arena square.

    Points come from a PCG64 generator keyed by the seed, in a fixed
    order (rover, heading, drone, goal, refuge); the drone and goal are
    rejection-resampled until their separation constraints hold, so a
    given seed always yields the same scenario.
    """
    if arena_side <= 2.0 * min_separation:
        raise GenerationError("arena_side must exceed twice min_separation")
    rng = np.random.default_rng(seed)
    rover_x = rng.uniform(0.0, arena_side)
    rover_y = rng.uniform(0.0, arena_side)
    heading = angle_wrap(rng.uniform(-math.pi, math.pi))
    drone = _draw_separated(rng, arena_side, rover_x, rover_y, min_separation, max_rejections, "drone")
    goal = _draw_separated(rng, arena_side, rover_x, rover_y, min_goal_distance, max_rejections, "goal")
    refuge = (rng.uniform(0.0, arena_side), rng.uniform(0.0, arena_side))
    return Scenario(
        seed=int(seed),
        rover_start=Pose2(rover_x, rover_y, heading),
        drone_start=Position3(drone[0], drone[1], 0.0),
        goal=Position3(goal[0], goal[1], 0.0),
        refuge=Position3(refuge[0], refuge[1], 0.0),
    )


def check_termination(
    world: WorldState,
    params: SimParams,
    rover_mode: RoverMode = RoverMode.TASK,
    drone_withdrawn: bool = False,
) -> EpisodeOutcome | None:
    """Classify the current world state, or None while the episode continues.

    Capture is tested first, against the full 3D distance; goal and
    refuge arrivals are horizontal. Hiding only counts while the rover is
    actually in refuge-seeking mode, and a withdrawn drone never captures.
    """
    if not drone_withdrawn:
        if euclidean_distance(world.rover.position(), world.drone) < params.capture_distance:
            return EpisodeOutcome.CAPTURED
    if horizontal_distance(world.rover, world.goal) < params.goal_radius:
        return EpisodeOutcome.GOAL_REACHED
    if rover_mode is RoverMode.REFUGE and horizontal_distance(world.rover, world.refuge) < params.goal_radius:
        return EpisodeOutcome.HIDDEN
    if world.t >= params.max_time:
        return EpisodeOutcome.TIMEOUT
    return None


def episode_rng(seed: int, preservation: str, mode_label: str) -> np.random.Generator:
    """Episode-local generator.

    Mixing in the configuration and pursuit-mode codes keeps protean
    draws independent across the comparison matrix while staying fully
    reproducible from the scenario seed.
    """
    return np.random.default_rng([seed, _PRESERVATION_CODES[preservation], _MODE_CODES[mode_label]])


def run_episode(scenario: Scenario, config: EpisodeConfig) -> EpisodeRecord:
    """Run one encounter to termination; deterministic in (scenario, config).

    Step order is fixed: risk sampling and behavior decision, rover move,
    drone move, then the termination check at the advanced clock.
    """
    params = config.params
    world = WorldState(
        rover=scenario.rover_start,
        drone=scenario.drone_start,
        drone_heading=heading_to(scenario.drone_start, scenario.rover_start),
        goal=scenario.goal,
        refuge=scenario.refuge,
        t=0.0,
        battery=config.battery,
    )
    rng = episode_rng(scenario.seed, config.preservation, config.drone_mode.label)
    engine = None if config.preservation == "C" else RiskEngine.from_profile(config.risk)
    behavior = RoverBehaviorState(RoverMode.TASK, entered_at=0.0)
    phase = DronePhase.LIFTING if world.drone.z < params.drone_cruise_altitude else DronePhase.PURSUING
    drone_state = DroneState(phase=phase, base=scenario.drone_start)
    trigger_counts = {"flee": 0, "protean": 0, "refuge": 0}

    d = euclidean_distance(world.rover.position(), world.drone)
    d_initial = d
    latest_total: float | None = None
    trace: list[TraceRow] | None = [] if config.record_trace else None

    steps = 0
    outcome = None
    while outcome is None:
        if engine is not None:
            breakdown = engine.ingest(world.t, d, battery_depletion(world.t, config.battery))
            if breakdown is not None:
                latest_total = breakdown.total
                command = select_response(breakdown.total, config.risk.thresholds, config.preservation)
                updated = apply_behavior_transition(behavior, command, world.t, config.dwell)
                if updated.mode is not behavior.mode and updated.mode in _BEHAVIOR_NAMES:
                    trigger_counts[_BEHAVIOR_NAMES[updated.mode]] += 1
                behavior = updated
        if trace is not None:
            trace.append((world.t, world.rover.x, world.rover.y, world.drone.x, world.drone.y, world.drone.z, d, latest_total))
        world.rover, behavior = rover_step(behavior, world, params, config.protean, rng)
        world.drone, world.drone_heading, drone_state = drone_step(drone_state, config.drone_mode, world, params)
        steps += 1
        world.t = steps * params.dt
        d = euclidean_distance(world.rover.position(), world.drone)
        outcome = check_termination(
            world,
            params,
            rover_mode=behavior.mode,
            drone_withdrawn=drone_state.phase is DronePhase.WITHDRAWN,
        )
    if trace is not None:
        trace.append((world.t, world.rover.x, world.rover.y, world.drone.x, world.drone.y, world.drone.z, d, latest_total))

    triggered = tuple(name for name in ("flee", "protean", "refuge") if trigger_counts[name] > 0)
    return EpisodeRecord(
        seed=scenario.seed,
        preservation=config.preservation,
        mode=config.drone_mode.label,
        outcome=outcome,
        t_end=world.t,
        d_initial=d_initial,
        d_final=d,
        triggered=triggered,
        trigger_counts=trigger_counts,
        trace=trace,
    )
