"""Synthetic top-down field scenes for desk-scale segmentation experiments.

Each scene is a brown soil background with large green crop blobs and small
darker yellow-green weed blobs, plus the matching label mask (0 = soil,
1 = crop, 2 = weed). Weed blobs are added until the requested pixel fraction
is met, with blob size capped by the remaining budget so the realized
fraction stays within +/-50% of the target.
"""

from __future__ import annotations

import math

import numpy as np

from .channels import build_channel_stack

SOIL_RGB = (118.0, 86.0, 60.0)
CROP_RGB = (45.0, 150.0, 48.0)
WEED_RGB = (105.0, 120.0, 40.0)


def _ellipse_region(
    h: int, w: int, cx: float, cy: float, rx: float, ry: float, angle: float
) -> np.ndarray:
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs - cx
    dy = ys - cy
    ca, sa = math.cos(angle), math.sin(angle)
    u = (dx * ca + dy * sa) / rx
    v = (-dx * sa + dy * ca) / ry
    return u * u + v * v <= 1.0


def _paint(img: np.ndarray, region: np.ndarray, color, rng: np.random.Generator) -> None:
    n = int(region.sum())
    if n:
        img[region] = np.asarray(color) + rng.normal(0.0, 8.0, size=(n, 3))


def generate_synthetic_scene(
    seed, width: int = 64, height: int = 48, weed_fraction: float = 0.02
) -> tuple[np.ndarray, np.ndarray]:
    """One (rgb, mask) scene, deterministic per seed.

    Dimensions must be divisible by 4 so scenes feed the network directly.
    """
    if width % 4 or height % 4:
        raise ValueError(f"dimensions must be divisible by 4, got {width}x{height}")
    if not 0.0 <= weed_fraction < 1.0:
        raise ValueError(f"weed_fraction must be in [0, 1), got {weed_fraction!r}")
    rng = np.random.default_rng(seed)
    h, w = height, width

    img = np.asarray(SOIL_RGB) + rng.normal(0.0, 10.0, size=(h, w, 3))
    img += np.linspace(-8.0, 8.0, w)[None, :, None]  # gentle illumination ramp
    mask = np.zeros((h, w), dtype=np.uint8)

    for _ in range(int(rng.integers(3, 6))):
        region = _ellipse_region(
            h,
            w,
            cx=rng.uniform(0.12, 0.88) * w,
            cy=rng.uniform(0.15, 0.85) * h,
            rx=rng.uniform(0.09, 0.16) * w,
            ry=rng.uniform(0.12, 0.22) * h,
            angle=rng.uniform(0.0, math.pi),
        )
        _paint(img, region, CROP_RGB, rng)
        mask[region] = 1

    target = weed_fraction * h * w
    guard = 0
    while target > 0.0 and int((mask == 2).sum()) < target and guard < 10_000:
        guard += 1
        remaining = target - int((mask == 2).sum())
        r_cap = max(0.6, min(2.2, math.sqrt(max(remaining, 1.0) / math.pi)))
        region = _ellipse_region(
            h,
            w,
            cx=rng.uniform(0.03, 0.97) * w,
            cy=rng.uniform(0.03, 0.97) * h,
            rx=rng.uniform(0.6, r_cap),
            ry=rng.uniform(0.6, r_cap),
            angle=rng.uniform(0.0, math.pi),
        )
        _paint(img, region, WEED_RGB, rng)
        mask[region] = 2

    return np.clip(img, 0.0, 255.0).astype(np.uint8), mask


def synthetic_pairs(
    count: int, seed: int = 0, width: int = 64, height: int = 48, weed_fraction: float = 0.02
) -> list[tuple[np.ndarray, np.ndarray]]:
    """A list of (rgb, mask) scenes with per-scene seeds derived from one master seed."""
    return [
        generate_synthetic_scene((seed, i), width, height, weed_fraction) for i in range(count)
    ]


def synthetic_dataset(
    count: int, seed: int = 0, width: int = 64, height: int = 48, weed_fraction: float = 0.02
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Training-ready (channel stack, mask) pairs built from synthetic scenes."""
    return [
        (build_channel_stack(img), mask)
        for img, mask in synthetic_pairs(count, seed, width, height, weed_fraction)
    ]
