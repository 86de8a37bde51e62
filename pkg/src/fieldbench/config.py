"""World configuration: JSON schema, defaults, and validation.

A config file is a JSON object with these sections (all optional except
`seed`, which is mandatory because every run must be reproducible):

    {
      "seed": 42,
      "field":   {"rows", "row_length", "row_spacing", "origin", "heading"},
      "robot":   {"wheel_radius", "track_width", "v_max", "omega_max",
                  "k_v", "k_omega", "tolerance"},
      "sensors": {"gyro"|"mag"|"gps": {"sigma", "sigma_b", "tau", "bias",
                  "rate"}, "gps" also: "origin_lat", "origin_lon"},
      "filters": {"median_window", "kalman_q", "kalman_r"},
      "sim":     {"dt", "duration", "mode", "speed"},
      "camera":  {"enabled", "interval", "source", "width", "height",
                  "weed_fraction"}
    }

Unknown keys are rejected so typos fail loudly; every violation names the
offending field.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class FieldConfig:
    rows: int = 3
    row_length: float = 8.0
    row_spacing: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)
    heading: float = 0.0


@dataclass
class RobotConfig:
    wheel_radius: float = 0.1
    track_width: float = 0.6
    v_max: float = 0.5
    omega_max: float = 1.0
    k_v: float = 0.8
    k_omega: float = 2.0
    tolerance: float = 0.2


@dataclass
class SensorChannelConfig:
    sigma: float = 0.0
    sigma_b: float = 0.0
    tau: float = 50.0
    bias: float = 0.0
    rate: float = 10.0


@dataclass
class GpsConfig(SensorChannelConfig):
    origin_lat: float = 0.0
    origin_lon: float = 0.0


@dataclass
class SensorsConfig:
    gyro: SensorChannelConfig = dc_field(
        default_factory=lambda: SensorChannelConfig(sigma=0.01, rate=50.0)
    )
    mag: SensorChannelConfig = dc_field(
        default_factory=lambda: SensorChannelConfig(sigma=0.05, tau=50.0, rate=20.0)
    )
    gps: GpsConfig = dc_field(default_factory=lambda: GpsConfig(sigma=0.5, rate=5.0))


@dataclass
class FilterConfig:
    median_window: int = 5
    kalman_q: float = 2e-3  # tracking-tuned for turning headings
    kalman_r: float = 2.5e-3  # default mag sigma squared


@dataclass
class SimConfig:
    dt: float = 0.02
    duration: float = 120.0
    mode: str = "auto"
    speed: float = 1.0  # realtime multiplier for the live service


@dataclass
class CameraConfig:
    enabled: bool = False
    interval: float = 1.0
    source: str = "synthetic"  # "synthetic" or a directory path
    width: int = 64
    height: int = 48
    weed_fraction: float = 0.02


@dataclass
class WorldConfig:
    seed: int = 0
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    robot: RobotConfig = dc_field(default_factory=RobotConfig)
    sensors: SensorsConfig = dc_field(default_factory=SensorsConfig)
    filters: FilterConfig = dc_field(default_factory=FilterConfig)
    sim: SimConfig = dc_field(default_factory=SimConfig)
    camera: CameraConfig = dc_field(default_factory=CameraConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_SECTIONS = {
    "field": (FieldConfig, None),
    "robot": (RobotConfig, None),
    "filters": (FilterConfig, None),
    "sim": (SimConfig, None),
    "camera": (CameraConfig, None),
}

_SENSOR_SECTIONS = {"gyro": SensorChannelConfig, "mag": SensorChannelConfig, "gps": GpsConfig}


def _build_section(cls, data: dict, prefix: str):
    obj = cls()
    valid = set(obj.__dataclass_fields__)
    for key, value in data.items():
        if key not in valid:
            raise ConfigError(f"unknown field {prefix}.{key}")
        if key == "origin":
            value = tuple(float(v) for v in value)
            if len(value) != 2:
                raise ConfigError(f"{prefix}.origin must be [x, y]")
        setattr(obj, key, value)
    return obj


def config_from_dict(data: dict) -> WorldConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    if "seed" not in data:
        raise ConfigError("seed is required (runs must be reproducible)")
    cfg = WorldConfig(seed=int(data["seed"]))
    for key, value in data.items():
        if key == "seed":
            continue
        elif key in _SECTIONS:
            cls, _ = _SECTIONS[key]
            setattr(cfg, key, _build_section(cls, value, key))
        elif key == "sensors":
            for sensor_name, sensor_data in value.items():
                if sensor_name not in _SENSOR_SECTIONS:
                    raise ConfigError(f"unknown field sensors.{sensor_name}")
                setattr(
                    cfg.sensors,
                    sensor_name,
                    _build_section(
                        _SENSOR_SECTIONS[sensor_name], sensor_data, f"sensors.{sensor_name}"
                    ),
                )
        else:
            raise ConfigError(f"unknown field {key}")
    validate(cfg)
    return cfg


def validate(cfg: WorldConfig) -> None:
    def require(cond: bool, message: str) -> None:
        if not cond:
            raise ConfigError(message)

    require(cfg.field.rows >= 1, "field.rows must be >= 1")
    require(cfg.field.row_length > 0, "field.row_length must be > 0")
    require(cfg.field.row_spacing > 0, "field.row_spacing must be > 0")

    require(cfg.robot.wheel_radius > 0, "robot.wheel_radius must be > 0")
    require(cfg.robot.track_width > 0, "robot.track_width must be > 0")
    require(cfg.robot.v_max > 0, "robot.v_max must be > 0")
    require(cfg.robot.omega_max > 0, "robot.omega_max must be > 0")
    require(cfg.robot.k_v > 0, "robot.k_v must be > 0")
    require(cfg.robot.k_omega > 0, "robot.k_omega must be > 0")
    require(cfg.robot.tolerance > 0, "robot.tolerance must be > 0")

    require(cfg.sim.dt > 0, "sim.dt must be > 0")
    require(cfg.sim.duration >= 0, "sim.duration must be >= 0")
    require(cfg.sim.mode in ("auto", "teleop"), "sim.mode must be 'auto' or 'teleop'")
    require(cfg.sim.speed > 0, "sim.speed must be > 0")

    for name in ("gyro", "mag", "gps"):
        ch = getattr(cfg.sensors, name)
        require(ch.sigma >= 0, f"sensors.{name}.sigma must be >= 0")
        require(ch.sigma_b >= 0, f"sensors.{name}.sigma_b must be >= 0")
        require(ch.tau > 0, f"sensors.{name}.tau must be > 0")
        require(ch.rate > 0, f"sensors.{name}.rate must be > 0")
        require(
            ch.rate <= 1.0 / cfg.sim.dt + 1e-9,
            f"sensors.{name}.rate exceeds the tick rate 1/sim.dt",
        )
    require(abs(cfg.sensors.gps.origin_lat) < 90, "sensors.gps.origin_lat must satisfy |lat| < 90")

    require(cfg.filters.median_window >= 1, "filters.median_window must be >= 1")
    require(cfg.filters.kalman_q >= 0, "filters.kalman_q must be >= 0")
    require(cfg.filters.kalman_r > 0, "filters.kalman_r must be > 0")

    require(cfg.camera.interval > 0, "camera.interval must be > 0")
    require(cfg.camera.width % 4 == 0 and cfg.camera.width > 0, "camera.width must be a positive multiple of 4")
    require(cfg.camera.height % 4 == 0 and cfg.camera.height > 0, "camera.height must be a positive multiple of 4")
    require(0 <= cfg.camera.weed_fraction < 1, "camera.weed_fraction must be in [0, 1)")


def load_config(path: str | Path) -> WorldConfig:
    """Load, default-fill, and validate a JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def save_config(cfg: WorldConfig, path: str | Path) -> None:
    Path(path).write_text(cfg.to_json() + "\n")
