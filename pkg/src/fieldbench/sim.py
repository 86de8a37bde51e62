"""Deterministic fixed-step simulation loop and log emission.

Each tick advances truth -> sensors -> filters -> controller -> actuation.
Sensors fire on their own schedules (sample k of a channel with rate f is due
at k/f), filters update only when their sensor fires, and the commanded twist
integrates the truth pose over the tick. Everything is seeded through one
seed sequence, so a (config, seed) pair reproduces byte-identical logs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .channels import build_channel_stack, otsu_vegetation_mask
from .config import WorldConfig
from .filters import FusedPose, Kalman1D, MedianFilter
from .kinematics import (
    Pose2D,
    RobotGeometry,
    Twist,
    integrate_pose,
    twist_to_wheel_speeds,
    wrap_angle,
)
from .navigation import NavState, Waypoint, generate_row_waypoints
from .segnet import SegNetParams, forward, predict_mask
from .sensors import GeoOrigin, NoiseChannel, gps_to_local_xy, simulate_gps

TELEOP_DEADMAN_S = 0.5


@dataclass(frozen=True)
class TickRecord:
    """One simulation tick: ground truth, estimates, and the applied command."""

    tick: int
    t: float
    truth_x: float
    truth_y: float
    truth_theta: float
    fused_x: float
    fused_y: float
    fused_theta: float
    gps_x: float
    gps_y: float
    heading_raw: float
    heading_median: float
    heading_kalman: float
    cmd_vx: float
    cmd_omega: float
    wheel_fl: float
    wheel_rl: float
    wheel_fr: float
    wheel_rr: float
    waypoint_index: int
    done: bool

    def to_dict(self) -> dict:
        return asdict(self)


class _Schedule:
    """Fires sample k of a fixed-rate sensor at time k/rate."""

    def __init__(self, rate: float):
        self.period = 1.0 / rate
        self.count = 0

    def due(self, t: float) -> bool:
        if t + 1e-9 >= self.count * self.period:
            self.count += 1
            return True
        return False


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


class Simulator:
    """Owns all mutable simulation state; step() advances exactly one tick."""

    def __init__(self, cfg: WorldConfig):
        self.cfg = cfg
        self.dt = cfg.sim.dt
        self.geometry = RobotGeometry(cfg.robot.wheel_radius, cfg.robot.track_width)
        origin = Waypoint(*cfg.field.origin)
        self.nav = NavState(
            waypoints=generate_row_waypoints(
                cfg.field.rows,
                cfg.field.row_length,
                cfg.field.row_spacing,
                origin,
                cfg.field.heading,
            ),
            tolerance=cfg.robot.tolerance,
            k_v=cfg.robot.k_v,
            k_omega=cfg.robot.k_omega,
            v_max=cfg.robot.v_max,
            omega_max=cfg.robot.omega_max,
        )
        self.truth = Pose2D(origin.x, origin.y, cfg.field.heading)
        self.geo_origin = GeoOrigin(cfg.sensors.gps.origin_lat, cfg.sensors.gps.origin_lon)

        streams = np.random.SeedSequence(cfg.seed).spawn(4)
        mk = lambda c, ss: NoiseChannel(
            sigma_y=c.sigma,
            sigma_b=c.sigma_b,
            tau=c.tau,
            bias=c.bias,
            rng=np.random.default_rng(ss),
        )
        self.gyro_ch = mk(cfg.sensors.gyro, streams[0])
        self.mag_ch = mk(cfg.sensors.mag, streams[1])
        self.gps_x_ch = mk(cfg.sensors.gps, streams[2])
        self.gps_y_ch = mk(cfg.sensors.gps, streams[3])
        self._gyro_due = _Schedule(cfg.sensors.gyro.rate)
        self._mag_due = _Schedule(cfg.sensors.mag.rate)
        self._gps_due = _Schedule(cfg.sensors.gps.rate)

        self.median = MedianFilter(cfg.filters.median_window)
        self.kalman = Kalman1D(q=cfg.filters.kalman_q, r=cfg.filters.kalman_r)

        self.mode = cfg.sim.mode
        self.tick = 0
        self.last_twist = Twist()
        self.last_gyro = 0.0
        self._heading_raw = 0.0
        self._heading_median = 0.0
        self._gps_xy: tuple[float, float] | None = None
        self._teleop_twist = Twist()
        self._teleop_at = -math.inf

    @property
    def t(self) -> float:
        return self.tick * self.dt

    def set_mode(self, mode: str) -> None:
        if mode not in ("auto", "teleop"):
            raise ValueError(f"mode must be 'auto' or 'teleop', got {mode!r}")
        self.mode = mode

    def set_teleop_twist(self, vx: float, omega: float) -> Twist:
        """Store a teleop command, clamped to the configured limits."""
        twist = Twist(
            vx=_clamp(float(vx), -self.cfg.robot.v_max, self.cfg.robot.v_max),
            vy=0.0,
            omega=_clamp(float(omega), -self.cfg.robot.omega_max, self.cfg.robot.omega_max),
        )
        self._teleop_twist = twist
        self._teleop_at = self.t
        return twist

    def _command(self, fused: FusedPose) -> Twist:
        if self.mode == "teleop":
            if self.t - self._teleop_at > TELEOP_DEADMAN_S:
                return Twist()  # dead-man: stale command decays to rest
            return self._teleop_twist
        cmd = self.nav.step(fused)
        return Twist(
            vx=_clamp(cmd.vx, -self.cfg.robot.v_max, self.cfg.robot.v_max),
            vy=0.0,
            omega=_clamp(cmd.omega, -self.cfg.robot.omega_max, self.cfg.robot.omega_max),
        )

    def step(self) -> TickRecord:
        t = self.t
        dt = self.dt
        for ch in (self.gyro_ch, self.mag_ch, self.gps_x_ch, self.gps_y_ch):
            ch.step_bias(dt)

        if self._mag_due.due(t):
            self._heading_raw = wrap_angle(self.mag_ch.sample(self.truth.theta))
            self._heading_median = self.median.step(self._heading_raw)
            self.kalman.step(self._heading_raw, angular=True)
        if self._gyro_due.due(t):
            self.last_gyro = self.gyro_ch.sample(self.last_twist.omega)
        if self._gps_due.due(t):
            fix = simulate_gps(self.truth, self.geo_origin, self.gps_x_ch, self.gps_y_ch, t)
            self._gps_xy = gps_to_local_xy(fix, self.geo_origin)

        assert self._gps_xy is not None and self.kalman.x_hat is not None
        fused = FusedPose(self._gps_xy[0], self._gps_xy[1], self.kalman.x_hat, t)

        cmd = self._command(fused)
        wheels = twist_to_wheel_speeds(cmd, self.geometry)
        record = TickRecord(
            tick=self.tick,
            t=t,
            truth_x=self.truth.x,
            truth_y=self.truth.y,
            truth_theta=self.truth.theta,
            fused_x=fused.x,
            fused_y=fused.y,
            fused_theta=fused.theta,
            gps_x=self._gps_xy[0],
            gps_y=self._gps_xy[1],
            heading_raw=self._heading_raw,
            heading_median=self._heading_median,
            heading_kalman=self.kalman.x_hat,
            cmd_vx=cmd.vx,
            cmd_omega=cmd.omega,
            wheel_fl=wheels.front_left,
            wheel_rl=wheels.rear_left,
            wheel_fr=wheels.front_right,
            wheel_rr=wheels.rear_right,
            waypoint_index=self.nav.current_index,
            done=self.nav.done,
        )
        self.truth = integrate_pose(self.truth, cmd, dt)
        self.last_twist = cmd
        self.tick += 1
        return record


def run_simulation(cfg: WorldConfig) -> list[TickRecord]:
    """Run the configured scenario start to finish and return every tick."""
    sim = Simulator(cfg)
    n_ticks = int(round(cfg.sim.duration / cfg.sim.dt))
    return [sim.step() for _ in range(n_ticks)]


def emit_plot_data(records: list[TickRecord], out_dir: str | Path) -> dict[str, Path]:
    """Write heading.csv and trajectory.csv; returns the paths written."""
    if not records:
        raise ValueError("no records to emit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    heading = out_dir / "heading.csv"
    with heading.open("w", newline="") as f:
        f.write("t,raw,median_filtered,kalman_filtered\n")
        for r in records:
            f.write(f"{r.t!r},{r.heading_raw!r},{r.heading_median!r},{r.heading_kalman!r}\n")

    trajectory = out_dir / "trajectory.csv"
    with trajectory.open("w", newline="") as f:
        f.write("t,truth_x,truth_y,fused_x,fused_y,gps_x,gps_y\n")
        for r in records:
            f.write(
                f"{r.t!r},{r.truth_x!r},{r.truth_y!r},"
                f"{r.fused_x!r},{r.fused_y!r},{r.gps_x!r},{r.gps_y!r}\n"
            )
    return {"heading": heading, "trajectory": trajectory}


def write_records_jsonl(records: list[TickRecord], path: str | Path) -> None:
    import json

    with Path(path).open("w") as f:
        for r in records:
            f.write(json.dumps(r.to_dict()) + "\n")


@dataclass(frozen=True)
class SegFrame:
    """One processed camera frame: predicted mask plus per-class pixel fractions."""

    index: int
    t: float
    mask: np.ndarray
    fractions: tuple[float, float, float]


@dataclass(frozen=True)
class PipelineResult:
    frames: list[SegFrame]
    source_exhausted: bool


class FrameSource:
    """Camera frames from the synthetic generator or a directory of images.

    A directory source may be flat (PNG/PPM files) or a dataset root with an
    images/ subdirectory; files are consumed in sorted order.
    """

    def __init__(self, cfg: WorldConfig):
        cam = cfg.camera
        self._synthetic = cam.source == "synthetic"
        self._index = 0
        if self._synthetic:
            self._cam = cam
            self._seed = cfg.seed
            self._paths = None
        else:
            root = Path(cam.source)
            if (root / "images").is_dir():
                root = root / "images"
            self._paths = sorted(
                p for p in root.glob("*") if p.suffix.lower() in (".png", ".ppm")
            )
            if not self._paths:
                raise ValueError(f"empty image directory: {cam.source}")

    def next_frame(self) -> np.ndarray | None:
        """The next RGB frame, or None once a directory source is exhausted."""
        if self._synthetic:
            from .scenes import generate_synthetic_scene

            img, _ = generate_synthetic_scene(
                (self._seed, self._index),
                self._cam.width,
                self._cam.height,
                self._cam.weed_fraction,
            )
            self._index += 1
            return img
        if self._index >= len(self._paths):
            return None
        from .imgio import read_rgb

        img = read_rgb(self._paths[self._index])
        self._index += 1
        return img


def class_fractions(mask: np.ndarray) -> tuple[float, float, float]:
    counts = np.bincount(np.asarray(mask).ravel(), minlength=3)[:3]
    return tuple((counts / max(mask.size, 1)).tolist())


def segment_frame(img: np.ndarray, params: SegNetParams | None) -> np.ndarray:
    """Predict a label mask; with no parameters, fall back to the classical
    greenness-threshold baseline (vegetation labeled as crop)."""
    stack = build_channel_stack(img)
    if params is None:
        return otsu_vegetation_mask(stack[6])
    return predict_mask(params, stack)


def run_segmentation_pipeline(cfg: WorldConfig, params: SegNetParams | None) -> PipelineResult:
    """Process one camera frame per interval for the configured duration."""
    source = FrameSource(cfg)
    budget = int(cfg.sim.duration / cfg.camera.interval)
    frames: list[SegFrame] = []
    exhausted = False
    for i in range(budget):
        img = source.next_frame()
        if img is None:
            exhausted = True
            break
        mask = segment_frame(img, params)
        frames.append(
            SegFrame(
                index=i,
                t=i * cfg.camera.interval,
                mask=mask,
                fractions=class_fractions(mask),
            )
        )
    return PipelineResult(frames=frames, source_exhausted=exhausted)


def runtime_report(params: SegNetParams, width: int = 512, height: int = 384, repeats: int = 3):
    """Single-threaded forward-pass throughput at full camera resolution."""
    import time

    rng = np.random.default_rng(0)
    stack = rng.uniform(0.0, 1.0, size=(10, height, width))
    forward(params, stack)  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        forward(params, stack)
    elapsed = (time.perf_counter() - start) / repeats
    return {"width": width, "height": height, "seconds_per_frame": elapsed, "fps": 1.0 / elapsed}
