"""Finite-state controllers for the rover and the pursuing drone.

The rover runs a turn-then-translate law toward a target chosen by its
behavior mode; every self-preservation mode doubles the task speed. The
drone lifts vertically, then pursues with a capped turn rate while always
advancing; a cautious drone withdraws to its launch point once its
give-up time elapses and no longer threatens capture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ContractViolation
from .model import (
    Pose2,
    Position3,
    SimParams,
    WorldState,
    angle_wrap,
    heading_to,
    horizontal_distance,
    integrate_unicycle,
)
from .risk import BehaviorCommand


class RoverMode(Enum):
    TASK = "task"
    FLEE = "flee"
    PROTEAN = "protean"
    REFUGE = "refuge"
    STOPPED = "stopped"


_COMMAND_MODES = {
    BehaviorCommand.CONTINUE_TASK: RoverMode.TASK,
    BehaviorCommand.FLEE: RoverMode.FLEE,
    BehaviorCommand.PROTEAN: RoverMode.PROTEAN,
    BehaviorCommand.REFUGE: RoverMode.REFUGE,
}


@dataclass(frozen=True)
class RoverBehaviorState:
    """Current rover control mode, when it was entered, any protean subgoal."""

    mode: RoverMode = RoverMode.TASK
    entered_at: float = 0.0
    subgoal: Position3 | None = None


@dataclass(frozen=True)
class ProteanParams:
    """Randomized-flight tuning: subgoal spacing, bearing jitter, arrival radius."""

    subgoal_distance: float = 5.0
    heading_jitter: float = math.pi / 4.0
    arrival_radius: float = 0.5

    def __post_init__(self) -> None:
        if not self.subgoal_distance > self.arrival_radius > 0:
            raise ValueError("need subgoal_distance > arrival_radius > 0")
        if not 0.0 <= self.heading_jitter <= math.pi / 2.0:
            raise ValueError("heading_jitter must lie in [0, pi/2]")


@dataclass(frozen=True)
class DroneMode:
    """Pursuit endurance: persistent never quits, cautious gives up and goes home."""

    cautious: bool = False
    giveup_time: float = 40.0

    def __post_init__(self) -> None:
        if self.giveup_time <= 0:
            raise ValueError("giveup_time must be positive")

    @property
    def label(self) -> str:
        return "cautious" if self.cautious else "persistent"


PERSISTENT = DroneMode(cautious=False)


class DronePhase(Enum):
    LIFTING = "lifting"
    PURSUING = "pursuing"
    WITHDRAWN = "withdrawn"


@dataclass(frozen=True)
class DroneState:
    phase: DronePhase
    base: Position3


def protean_subgoal(rover: Pose2, drone: Position3, params: ProteanParams, rng) -> Position3:
    """Place the next flight subgoal away from the drone with a jittered bearing.

    Draws exactly one uniform value from `rng`. If the drone sits exactly
    over the rover, the away bearing falls back to the rover's heading.
    """
    if drone.x == rover.x and drone.y == rover.y:
        away = rover.heading
    else:
        away = heading_to(drone, rover)
    bearing = angle_wrap(away + rng.uniform(-params.heading_jitter, params.heading_jitter))
    return Position3(
        rover.x + params.subgoal_distance * math.cos(bearing),
        rover.y + params.subgoal_distance * math.sin(bearing),
        0.0,
    )


def rover_step(
    state: RoverBehaviorState,
    world: WorldState,
    params: SimParams,
    protean: ProteanParams,
    rng,
) -> tuple[Pose2, RoverBehaviorState]:
    """Advance the rover one step under its current behavior mode.

    Returns the new pose and the (possibly updated) behavior state. The
    rover rotates in place while its heading error exceeds the tolerance,
    otherwise it translates; response modes move at twice the task speed
    and a protean rover resamples its subgoal on arrival.
    """
    if state.mode is RoverMode.STOPPED:
        raise ContractViolation("cannot step a stopped rover")
    if state.mode is RoverMode.PROTEAN:
        subgoal = state.subgoal
        if subgoal is None or horizontal_distance(world.rover, subgoal) < protean.arrival_radius:
            subgoal = protean_subgoal(world.rover, world.drone, protean, rng)
            state = replace(state, subgoal=subgoal)
        target = subgoal
    elif state.mode is RoverMode.REFUGE:
        target = world.refuge
    else:
        target = world.goal
    speed = params.rover_speed if state.mode is RoverMode.TASK else 2.0 * params.rover_speed
    error = angle_wrap(heading_to(world.rover, target) - world.rover.heading)
    if abs(error) > params.heading_tolerance:
        pose = integrate_unicycle(world.rover, 0.0, math.copysign(params.rover_turn_rate, error), params.dt)
    else:
        pose = integrate_unicycle(world.rover, speed, 0.0, params.dt)
    return pose, state


def _steer(position: Position3, heading: float, target, params: SimParams) -> tuple[Position3, float]:
    """Turn toward the target, capped per step, and advance at pursuit speed."""
    error = angle_wrap(heading_to(position, target) - heading)
    max_turn = params.drone_turn_rate * params.dt
    new_heading = angle_wrap(heading + min(max(error, -max_turn), max_turn))
    step = params.drone_speed * params.dt
    return (
        Position3(
            position.x + step * math.cos(new_heading),
            position.y + step * math.sin(new_heading),
            position.z,
        ),
        new_heading,
    )


def drone_step(
    state: DroneState,
    mode: DroneMode,
    world: WorldState,
    params: SimParams,
) -> tuple[Position3, float, DroneState]:
    """Advance the drone one step; returns (position, heading, state).

    Lift is purely vertical at the pursuit speed. While pursuing, the
    drone turns toward the rover with its per-step turn capped and always
    advances. A cautious drone withdraws once the episode clock reaches
    its give-up time, flies back to base, and hovers there.
    """
    position, heading = world.drone, world.drone_heading
    if state.phase is not DronePhase.WITHDRAWN and mode.cautious and world.t >= mode.giveup_time:
        state = replace(state, phase=DronePhase.WITHDRAWN)
    if state.phase is DronePhase.LIFTING:
        altitude = position.z + params.drone_speed * params.dt
        if altitude >= params.drone_cruise_altitude:
            altitude = params.drone_cruise_altitude
            state = replace(state, phase=DronePhase.PURSUING)
        return Position3(position.x, position.y, altitude), heading, state
    if state.phase is DronePhase.PURSUING:
        new_position, new_heading = _steer(position, heading, world.rover, params)
        return new_position, new_heading, state
    if horizontal_distance(position, state.base) < params.goal_radius:
        return position, heading, state
    new_position, new_heading = _steer(position, heading, state.base, params)
    return new_position, new_heading, state


def apply_behavior_transition(
    current: RoverBehaviorState,
    selected: BehaviorCommand,
    t: float,
    dwell: float,
) -> RoverBehaviorState:
    """Adopt the selected behavior once the current one has run its dwell time.

    Re-selecting the active behavior never resets its entry time.
    """
    if current.mode is RoverMode.STOPPED:
        raise ContractViolation("cannot transition a stopped rover")
    if t - current.entered_at < dwell:
        return current
    target = _COMMAND_MODES[selected]
    if target is current.mode:
        return current
    return RoverBehaviorState(mode=target, entered_at=t)
