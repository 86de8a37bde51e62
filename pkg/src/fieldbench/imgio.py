"""8-bit image I/O (PNG/PPM via Pillow) and label-mask colorization.

Label masks are single-plane index images with 0 = soil, 1 = crop, 2 = weed.
Colorized masks follow the soil/crop/weed = blue/green/red scheme used by the
telemetry overlay.
"""

from __future__ import annotations

import base64
import io
from pathlib import Path

import numpy as np
from PIL import Image

#: RGB colors per class index: soil blue, crop green, weed red.
CLASS_COLORS = np.array(
    [
        [40, 80, 220],
        [50, 200, 70],
        [230, 50, 50],
    ],
    dtype=np.uint8,
)


def read_rgb(path: str | Path) -> np.ndarray:
    """Load an image file as an (H, W, 3) uint8 array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def write_rgb(path: str | Path, img: np.ndarray) -> None:
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="RGB").save(path)


def read_mask(path: str | Path) -> np.ndarray:
    """Load a label mask (single-plane index image) as an (H, W) uint8 array."""
    with Image.open(path) as im:
        mask = np.asarray(im.convert("L"), dtype=np.uint8)
    bad = np.unique(mask[mask > 2])
    if bad.size:
        raise ValueError(f"mask {path} contains labels outside {{0, 1, 2}}: {bad.tolist()}")
    return mask


def write_mask(path: str | Path, mask: np.ndarray) -> None:
    Image.fromarray(np.asarray(mask, dtype=np.uint8), mode="L").save(path)


def mask_to_rgb(mask: np.ndarray) -> np.ndarray:
    """Colorize a class-index mask (blue soil, green crop, red weed)."""
    mask = np.asarray(mask)
    if mask.max(initial=0) > 2:
        raise ValueError("mask contains labels outside {0, 1, 2}")
    return CLASS_COLORS[mask.astype(np.intp)]


def mask_png_base64(mask: np.ndarray) -> str:
    """Colorized mask encoded as a base64 PNG string for telemetry frames."""
    buf = io.BytesIO()
    Image.fromarray(mask_to_rgb(mask), mode="RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")
