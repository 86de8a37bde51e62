"""Simulated IMU (gyro + magnetometer heading) and GPS with Gauss-Markov errors.

Every sensor channel carries a slowly drifting bias plus white noise:

    measured  = true + bias + N(0, sigma_y)
    d(bias)/dt = -bias / tau + N_B

The bias ODE is discretized with Euler-Maruyama, so a step of size dt adds
sqrt(dt) * sigma_b * eta on top of the deterministic decay (eta ~ N(0, 1)).
GPS noise is injected in local XY meters and converted to lat/lon through an
equirectangular projection about a fixed origin, which is accurate to well
under a millimeter at sub-kilometer field scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import Pose2D, Twist, wrap_angle

EARTH_RADIUS_M = 6_371_000.0

_DEG = math.pi / 180.0


@dataclass
class NoiseChannel:
    """One sensor axis: white noise sigma_y, bias drift sigma_b with time constant tau.

    Each channel owns its random stream, so channels evolve independently and
    two channels built from the same seed sequence never share draws.
    """

    sigma_y: float = 0.0
    sigma_b: float = 0.0
    tau: float = 1.0
    bias: float = 0.0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def __post_init__(self) -> None:
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")
        if self.sigma_y < 0.0 or self.sigma_b < 0.0:
            raise ValueError("noise deviations must be >= 0")
        if not math.isfinite(self.bias):
            raise ValueError(f"bias must be finite, got {self.bias!r}")

    def step_bias(self, dt: float) -> None:
        """Advance the bias by one Euler-Maruyama step of dt seconds (dt <= tau/10 recommended)."""
        if not dt > 0.0:
            raise ValueError(f"dt must be > 0, got {dt!r}")
        eta = self.rng.standard_normal() if self.sigma_b > 0.0 else 0.0
        self.bias += dt * (-self.bias / self.tau) + math.sqrt(dt) * self.sigma_b * eta

    def sample(self, true_value: float) -> float:
        """Measure true_value through the channel: true + bias + white noise."""
        if not math.isfinite(true_value):
            raise ValueError(f"true_value must be finite, got {true_value!r}")
        noise = self.rng.normal(0.0, self.sigma_y) if self.sigma_y > 0.0 else 0.0
        return true_value + self.bias + noise


@dataclass(frozen=True)
class ImuReading:
    gyro_z: float
    heading_mag: float
    timestamp: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "heading_mag", wrap_angle(self.heading_mag))


@dataclass(frozen=True)
class GpsReading:
    lat: float
    lon: float
    alt: float
    timestamp: float

    def __post_init__(self) -> None:
        if abs(self.lat) > 90.0:
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if abs(self.lon) > 180.0:
            raise ValueError(f"longitude out of range: {self.lon!r}")


@dataclass(frozen=True)
class GeoOrigin:
    lat0: float = 0.0
    lon0: float = 0.0
    earth_radius: float = EARTH_RADIUS_M

    def __post_init__(self) -> None:
        if abs(self.lat0) >= 90.0:
            raise ValueError(f"origin latitude must satisfy |lat0| < 90, got {self.lat0!r}")


def simulate_imu(
    truth_pose: Pose2D,
    truth_twist: Twist,
    gyro_ch: NoiseChannel,
    mag_ch: NoiseChannel,
    t: float,
) -> ImuReading:
    """Sample yaw rate and magnetometer heading from ground truth through noise channels."""
    gyro_z = gyro_ch.sample(truth_twist.omega)
    heading = wrap_angle(mag_ch.sample(truth_pose.theta))
    return ImuReading(gyro_z=gyro_z, heading_mag=heading, timestamp=t)


def local_xy_to_gps(x: float, y: float, origin: GeoOrigin, t: float = 0.0) -> GpsReading:
    """Project local XY meters back to lat/lon about the origin (altitude fixed at 0)."""
    lat = origin.lat0 + (y / origin.earth_radius) / _DEG
    lon = origin.lon0 + (x / (origin.earth_radius * math.cos(origin.lat0 * _DEG))) / _DEG
    return GpsReading(lat=lat, lon=lon, alt=0.0, timestamp=t)


def simulate_gps(
    truth_pose: Pose2D,
    origin: GeoOrigin,
    x_ch: NoiseChannel,
    y_ch: NoiseChannel,
    t: float,
) -> GpsReading:
    """Sample a GPS fix: noise applied to the true local XY, then projected to lat/lon."""
    noisy_x = x_ch.sample(truth_pose.x)
    noisy_y = y_ch.sample(truth_pose.y)
    return local_xy_to_gps(noisy_x, noisy_y, origin, t)


def gps_to_local_xy(g: GpsReading, origin: GeoOrigin) -> tuple[float, float]:
    """Equirectangular projection of a fix into local XY meters about the origin."""
    x = origin.earth_radius * (g.lon - origin.lon0) * _DEG * math.cos(origin.lat0 * _DEG)
    y = origin.earth_radius * (g.lat - origin.lat0) * _DEG
    return x, y
