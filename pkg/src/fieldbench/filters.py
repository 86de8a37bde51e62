"""Heading estimation: moving median filter, scalar Kalman filter, pose fusion.

The Kalman filter is the minimal random-walk scalar model (F = 1, H = 1):

    predict:  P <- P + q
    gain:     K = P / (P + r)
    update:   x <- x + K * (z - x),  P <- (1 - K) * P

For angular signals the innovation z - x is wrapped to (-pi, pi] before the
update and the estimate is re-wrapped afterwards, so measurements near the
+/-pi seam never drag the estimate the long way around.

The moving median buffers the last k samples in arrival order; during warm-up
it uses whatever is available. An even-sized buffer yields the mean of the two
middle values. The median operates on plain numbers, so a heading stream that
crosses the +/-pi seam is better served by the Kalman filter.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .kinematics import wrap_angle

__all__ = ["MedianFilter", "Kalman1D", "FusedPose", "fuse_pose", "wrap_angle"]


class MedianFilter:
    """Sliding-window median over the last `window` samples."""

    def __init__(self, window: int):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window!r}")
        self.window = window
        self._buf: deque[float] = deque(maxlen=window)

    def step(self, z: float) -> float:
        self._buf.append(float(z))
        return float(np.median(self._buf))


@dataclass
class Kalman1D:
    """Scalar random-walk Kalman filter state.

    x_hat is None until seeded; the first step seeds x_hat from the
    measurement and resets P to r.
    """

    x_hat: float | None = None
    P: float = 1.0
    q: float = 0.0
    r: float = 1.0

    def __post_init__(self) -> None:
        if not self.r > 0.0:
            raise ValueError(f"measurement variance r must be > 0, got {self.r!r}")
        if self.q < 0.0 or self.P < 0.0:
            raise ValueError("q and P must be >= 0")

    def step(self, z: float, angular: bool = False) -> float:
        if self.x_hat is None:
            self.x_hat = wrap_angle(z) if angular else float(z)
            self.P = self.r
            return self.x_hat
        self.P += self.q
        gain = self.P / (self.P + self.r)
        innovation = z - self.x_hat
        if angular:
            innovation = wrap_angle(innovation)
        x = self.x_hat + gain * innovation
        self.x_hat = wrap_angle(x) if angular else x
        self.P *= 1.0 - gain
        return self.x_hat


@dataclass(frozen=True)
class FusedPose:
    """Position from the latest GPS fix, heading from the filtered magnetometer."""

    x: float
    y: float
    theta: float
    timestamp: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))


def fuse_pose(
    gps_xy: tuple[float, float] | None,
    heading_filter: Kalman1D,
    mag_heading: float,
    t: float,
) -> FusedPose:
    """Combine the latest GPS XY with a Kalman-filtered magnetometer heading.

    Raises if no GPS fix has arrived yet. The first magnetometer sample seeds
    the heading filter.
    """
    if gps_xy is None:
        raise ValueError("no position reference: fuse_pose called before any GPS fix")
    theta = heading_filter.step(mag_heading, angular=True)
    return FusedPose(x=gps_xy[0], y=gps_xy[1], theta=theta, timestamp=t)
