"""Row-coverage waypoint generation and a proportional go-to-goal controller.

The controller turns toward the active waypoint with a proportional gain on
heading error and drives forward proportionally to distance, gated by
max(0, cos(heading error)) so the robot never drives away from the goal while
badly misaligned and never reverses. Linear and angular commands are issued
simultaneously. Waypoints are captured within a tolerance radius; at most one
waypoint is advanced per control tick so coarse time steps cannot skip rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .kinematics import Twist, wrap_angle

# Distances below this are treated as "at the goal" and yield zero bearing error.
_AT_GOAL = 1e-9


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"waypoint must be finite, got ({self.x!r}, {self.y!r})")


def bearing_distance(pose, w: Waypoint) -> tuple[float, float]:
    """Distance and wrapped bearing error from a pose (x, y, theta) to a waypoint."""
    dx = w.x - pose.x
    dy = w.y - pose.y
    d = math.hypot(dx, dy)
    if d < _AT_GOAL:
        return d, 0.0
    return d, wrap_angle(math.atan2(dy, dx) - pose.theta)


def generate_row_waypoints(
    rows: int,
    row_length: float,
    row_spacing: float,
    origin: Waypoint = Waypoint(0.0, 0.0),
    heading: float = 0.0,
) -> list[Waypoint]:
    """Serpentine coverage of `rows` parallel rows: 2 waypoints per row.

    Rows run along `heading`; the lateral step between rows is 90 degrees to
    the left of it. Row direction alternates so consecutive rows are driven
    in opposite senses.
    """
    if rows < 1:
        raise ValueError(f"rows must be >= 1, got {rows!r}")
    if not row_length > 0.0:
        raise ValueError(f"row_length must be > 0, got {row_length!r}")
    if not row_spacing > 0.0:
        raise ValueError(f"row_spacing must be > 0, got {row_spacing!r}")
    along = (math.cos(heading), math.sin(heading))
    across = (-math.sin(heading), math.cos(heading))
    waypoints = []
    for i in range(rows):
        near = Waypoint(
            origin.x + i * row_spacing * across[0],
            origin.y + i * row_spacing * across[1],
        )
        far = Waypoint(
            near.x + row_length * along[0],
            near.y + row_length * along[1],
        )
        waypoints.extend([near, far] if i % 2 == 0 else [far, near])
    return waypoints


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


@dataclass
class NavState:
    """Waypoint sequence plus controller gains and limits.

    done is set once the last waypoint is captured (immediately for an empty
    list); a done controller always commands zero twist.
    """

    waypoints: list[Waypoint] = field(default_factory=list)
    current_index: int = 0
    done: bool = False
    tolerance: float = 0.2
    k_v: float = 0.8
    k_omega: float = 2.0
    v_max: float = 0.5
    omega_max: float = 1.0

    def __post_init__(self) -> None:
        if not self.tolerance > 0.0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance!r}")
        for name in ("k_v", "k_omega", "v_max", "omega_max"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")
        if not self.waypoints:
            self.done = True

    @property
    def target(self) -> Waypoint | None:
        if self.done or self.current_index >= len(self.waypoints):
            return None
        return self.waypoints[self.current_index]

    def step(self, pose) -> Twist:
        """One control tick against a pose with x, y, theta attributes.

        Captures the active waypoint when within tolerance (advancing at most
        once per tick) and returns the twist toward the new target.
        """
        if self.done:
            return Twist()
        d, e_theta = bearing_distance(pose, self.waypoints[self.current_index])
        if d < self.tolerance:
            self.current_index += 1
            if self.current_index >= len(self.waypoints):
                self.done = True
                return Twist()
            d, e_theta = bearing_distance(pose, self.waypoints[self.current_index])
        omega = _clamp(self.k_omega * e_theta, -self.omega_max, self.omega_max)
        vx = _clamp(self.k_v * d, 0.0, self.v_max) * max(0.0, math.cos(e_theta))
        return Twist(vx=vx, vy=0.0, omega=omega)
