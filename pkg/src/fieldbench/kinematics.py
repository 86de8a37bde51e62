"""Skid-steer locomotion model: twist <-> wheel speeds and exact pose integration.

The four-wheel platform locks each side's front and rear wheels to one drive
speed, so kinematically it reduces to a differential drive with track width W
and wheel radius r:

    omega_left  = (vx - omega * W/2) / r
    omega_right = (vx + omega * W/2) / r

Lateral body velocity is slip, never commanded, and does not enter the
integrator. Pose integration uses the exact constant-twist arc rather than an
Euler step, so splitting a step in two reproduces the single step to within
floating-point error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# Yaw rates below this are integrated as straight-line motion.
_OMEGA_STRAIGHT = 1e-9


def wrap_angle(a: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    return math.pi - (math.pi - a) % TWO_PI


def _require_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class Pose2D:
    """Planar pose in the world frame. theta is always wrapped to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(x=self.x, y=self.y)
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class Twist:
    """Body-frame velocity: forward vx, lateral vy (slip, held 0), yaw rate omega."""

    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0


@dataclass(frozen=True)
class WheelSpeeds:
    """Angular speed of each wheel in rad/s. Side pairs are locked together."""

    front_left: float
    rear_left: float
    front_right: float
    rear_right: float

    @property
    def left(self) -> float:
        return self.front_left

    @property
    def right(self) -> float:
        return self.front_right


@dataclass(frozen=True)
class RobotGeometry:
    wheel_radius: float = 0.1
    track_width: float = 0.6

    def __post_init__(self) -> None:
        if not (math.isfinite(self.wheel_radius) and self.wheel_radius > 0.0):
            raise ValueError(f"wheel_radius must be > 0, got {self.wheel_radius!r}")
        if not (math.isfinite(self.track_width) and self.track_width > 0.0):
            raise ValueError(f"track_width must be > 0, got {self.track_width!r}")


def twist_to_wheel_speeds(t: Twist, g: RobotGeometry) -> WheelSpeeds:
    """Inverse kinematics: body twist to per-side wheel speeds. vy is ignored."""
    _require_finite(vx=t.vx, omega=t.omega)
    half_track = 0.5 * g.track_width
    left = (t.vx - t.omega * half_track) / g.wheel_radius
    right = (t.vx + t.omega * half_track) / g.wheel_radius
    return WheelSpeeds(left, left, right, right)


def wheel_speeds_to_twist(w: WheelSpeeds, g: RobotGeometry, pair_tol: float = 1e-9) -> Twist:
    """Forward kinematics. Each side's wheel pair must agree to within pair_tol."""
    if abs(w.front_left - w.rear_left) > pair_tol:
        raise ValueError(
            f"left wheel speeds differ: front {w.front_left!r} vs rear {w.rear_left!r}"
        )
    if abs(w.front_right - w.rear_right) > pair_tol:
        raise ValueError(
            f"right wheel speeds differ: front {w.front_right!r} vs rear {w.rear_right!r}"
        )
    vx = g.wheel_radius * (w.left + w.right) / 2.0
    omega = g.wheel_radius * (w.right - w.left) / g.track_width
    return Twist(vx=vx, vy=0.0, omega=omega)


def integrate_pose(p: Pose2D, t: Twist, dt: float) -> Pose2D:
    """Advance a pose along the exact constant-twist arc for one step of dt seconds.

    For |omega| below 1e-9 rad/s the motion is a straight line; otherwise the
    pose moves along a circular arc of radius vx/omega:

        x += (vx/omega) * (sin(theta + omega*dt) - sin(theta))
        y += (vx/omega) * (cos(theta) - cos(theta + omega*dt))
    """
    _require_finite(vx=t.vx, omega=t.omega, dt=dt)
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    theta1 = p.theta + t.omega * dt
    if abs(t.omega) < _OMEGA_STRAIGHT:
        x = p.x + t.vx * math.cos(p.theta) * dt
        y = p.y + t.vx * math.sin(p.theta) * dt
    else:
        radius = t.vx / t.omega
        x = p.x + radius * (math.sin(theta1) - math.sin(p.theta))
        y = p.y + radius * (math.cos(p.theta) - math.cos(theta1))
    return Pose2D(x, y, wrap_angle(theta1))
