"""Geometric primitives, world state, and fixed-timestep unicycle kinematics.

Both agents share the same planar motion model: headings are wrapped to
(-pi, pi] and a step turns first, then translates along the new heading,
so identical command streams always reproduce identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_TWO_PI = 2.0 * math.pi


def angle_wrap(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = theta % _TWO_PI
    if wrapped > math.pi:
        wrapped -= _TWO_PI
    return wrapped


@dataclass(frozen=True)
class Position3:
    """Point in 3D space (meters)."""

    x: float
    y: float
    z: float = 0.0


@dataclass(frozen=True)
class Pose2:
    """Planar pose; the heading is stored wrapped to (-pi, pi]."""

    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "heading", angle_wrap(self.heading))

    def position(self) -> Position3:
        """Ground-plane location of this pose (z = 0)."""
        return Position3(self.x, self.y, 0.0)


def euclidean_distance(a: Position3, b: Position3) -> float:
    """Straight-line distance between two points in 3D."""
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


def horizontal_distance(a, b) -> float:
    """Ground-plane distance between two objects with x/y attributes."""
    return math.hypot(a.x - b.x, a.y - b.y)


def heading_to(origin, target) -> float:
    """Bearing from `origin` to `target` in the ground plane.

    Accepts any pair of objects with x/y attributes. Horizontally
    coincident points are a degenerate case and map to bearing 0.
    """
    dx = target.x - origin.x
    dy = target.y - origin.y
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return angle_wrap(math.atan2(dy, dx))


def integrate_unicycle(pose: Pose2, linear: float, angular: float, dt: float) -> Pose2:
    """Advance a unicycle one step: turn first, then translate along the new heading."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    heading = angle_wrap(pose.heading + angular * dt)
    return Pose2(
        pose.x + linear * dt * math.cos(heading),
        pose.y + linear * dt * math.sin(heading),
        heading,
    )


@dataclass(frozen=True)
class BatteryModel:
    """Battery with a fixed total capacity and a linear discharge rate."""

    capacity: float = 600.0
    discharge_rate: float = 1.0

    def __post_init__(self) -> None:
        if self.capacity <= 0:
            raise ValueError("battery capacity must be positive")
        if self.discharge_rate < 0:
            raise ValueError("battery discharge rate must be >= 0")


@dataclass(frozen=True)
class SimParams:
    """Shared fixed-timestep simulation parameters.

    Speeds are m/s, turn rates rad/s, distances meters, times seconds.
    Capture is tested against the full 3D rover-drone distance, so the
    drone's cruise altitude must stay below `capture_distance` for
    captures to be reachable at all.
    """

    dt: float = 0.05
    max_time: float = 80.0
    rover_speed: float = 0.5
    rover_turn_rate: float = 1.0
    drone_speed: float = 0.5
    drone_turn_rate: float = 0.4
    capture_distance: float = 0.15
    goal_radius: float = 0.5
    drone_cruise_altitude: float = 0.1
    heading_tolerance: float = 0.1

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.max_time <= 0:
            raise ValueError("max_time must be positive")
        for name in ("rover_speed", "rover_turn_rate", "drone_speed", "drone_turn_rate"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.capture_distance <= 0:
            raise ValueError("capture_distance must be positive")
        if self.goal_radius <= 0:
            raise ValueError("goal_radius must be positive")
        if self.drone_cruise_altitude < 0:
            raise ValueError("drone_cruise_altitude must be >= 0")
        if self.heading_tolerance <= 0:
            raise ValueError("heading_tolerance must be positive")


@dataclass
class WorldState:
    """Mutable per-episode snapshot of both agents and the fixed locations."""

    rover: Pose2
    drone: Position3
    drone_heading: float
    goal: Position3
    refuge: Position3
    t: float = 0.0
    battery: BatteryModel = field(default_factory=BatteryModel)
