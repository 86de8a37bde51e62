"""10-channel image representation for vegetation segmentation.

Channel order is fixed: [R, G, B, H, S, V, ExG, ExR, CIVE, NDI].

The four vegetation indices follow the common agronomy definitions over
chromatic coordinates r = R/(R+G+B), g, b (a zero-sum pixel is treated as
neutral gray, r = g = b = 1/3):

    ExG  = 2g - r - b
    ExR  = 1.4r - g
    CIVE = 0.441r - 0.811g + 0.385b + 18.78745
    NDI  = (G - R) / (G + R)      with 0/0 -> 0

NDI is computed on raw (unnormalized) G and R. Because ExG, ExR and CIVE use
chromatic coordinates they are invariant to uniform intensity scaling.

In the stacked representation R, G, B are scaled by 1/255, H, S, V are already
in [0, 1], and each index plane is min-max normalized per image (a constant
plane maps to all zeros), so every stack value lies in [0, 1].
"""

from __future__ import annotations

import numpy as np

#: Index of each plane in a channel stack.
CHANNEL_NAMES = ("R", "G", "B", "H", "S", "V", "ExG", "ExR", "CIVE", "NDI")

CIVE_OFFSET = 18.78745


def _as_rgb_float(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ValueError(f"expected trailing RGB axis of size 3, got shape {rgb.shape}")
    if rgb.min() < 0 or rgb.max() > 255:
        raise ValueError("RGB components must lie in [0, 255]")
    return rgb


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Convert RGB in [0, 255] to HSV, each component in [0, 1] (H = degrees/360).

    Works on a single pixel (3,) or any array with a trailing RGB axis.
    Gray pixels get H = 0 and S = 0.
    """
    rgb = _as_rgb_float(rgb) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    spread = maxc - minc

    v = maxc
    s = np.where(maxc > 0.0, spread / np.where(maxc > 0.0, maxc, 1.0), 0.0)

    safe = np.where(spread > 0.0, spread, 1.0)
    h = np.zeros_like(maxc)
    is_r = (maxc == r) & (spread > 0.0)
    is_g = (maxc == g) & (spread > 0.0) & ~is_r
    is_b = (spread > 0.0) & ~is_r & ~is_g
    h = np.where(is_r, ((g - b) / safe) % 6.0, h)
    h = np.where(is_g, (b - r) / safe + 2.0, h)
    h = np.where(is_b, (r - g) / safe + 4.0, h)
    return np.stack([h / 6.0, s, v], axis=-1)


def vegetation_indices(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Raw (ExG, ExR, CIVE, NDI) for a pixel or an array with a trailing RGB axis."""
    rgb = _as_rgb_float(rgb)
    red, green, blue = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    total = red + green + blue
    safe_total = np.where(total > 0.0, total, 1.0)
    r = np.where(total > 0.0, red / safe_total, 1.0 / 3.0)
    g = np.where(total > 0.0, green / safe_total, 1.0 / 3.0)
    b = np.where(total > 0.0, blue / safe_total, 1.0 / 3.0)

    exg = 2.0 * g - r - b
    exr = 1.4 * r - g
    cive = 0.441 * r - 0.811 * g + 0.385 * b + CIVE_OFFSET
    gr = green + red
    ndi = np.where(gr > 0.0, (green - red) / np.where(gr > 0.0, gr, 1.0), 0.0)
    return exg, exr, cive, ndi


def minmax_normalize(plane: np.ndarray) -> np.ndarray:
    """Scale a plane to [0, 1] by its own range; a constant plane maps to zeros."""
    plane = np.asarray(plane, dtype=np.float64)
    lo = plane.min()
    hi = plane.max()
    if hi == lo:
        return np.zeros_like(plane)
    return (plane - lo) / (hi - lo)


def build_channel_stack(img: np.ndarray) -> np.ndarray:
    """Build the (10, H, W) normalized stack from an (H, W, 3) 8-bit RGB image."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[-1] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must contain at least one pixel")
    rgb = _as_rgb_float(img)
    hsv = rgb_to_hsv(img)
    exg, exr, cive, ndi = vegetation_indices(img)
    planes = [
        rgb[..., 0] / 255.0,
        rgb[..., 1] / 255.0,
        rgb[..., 2] / 255.0,
        hsv[..., 0],
        hsv[..., 1],
        hsv[..., 2],
        minmax_normalize(exg),
        minmax_normalize(exr),
        minmax_normalize(cive),
        minmax_normalize(ndi),
    ]
    return np.stack(planes, axis=0)


def otsu_threshold(plane: np.ndarray) -> int | None:
    """Otsu's threshold over 256 bins for a plane of values in [0, 1].

    Values are quantized to levels round(v * 255). Returns the smallest level
    t maximizing the between-class variance of the split {< t} vs {>= t}, or
    None for a zero-variance plane.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.min() < 0.0 or plane.max() > 1.0:
        raise ValueError("plane values must lie in [0, 1]")
    levels = np.rint(plane * 255.0).astype(np.int64)
    hist = np.bincount(levels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()

    # Incremental sweep: carry class-0 pixel count and level mass.
    cum_count = np.cumsum(hist)
    cum_mass = np.cumsum(hist * np.arange(256))
    grand_mass = cum_mass[-1]

    best_t = None
    best_var = 0.0
    for t in range(1, 256):
        n0 = cum_count[t - 1]
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        mu0 = cum_mass[t - 1] / n0
        mu1 = (grand_mass - cum_mass[t - 1]) / n1
        var_between = (n0 / total) * (n1 / total) * (mu0 - mu1) ** 2
        if var_between > best_var:
            best_var = var_between
            best_t = t
    return best_t


def otsu_vegetation_mask(exg_plane: np.ndarray) -> np.ndarray:
    """Binary vegetation mask from a normalized greenness plane via Otsu thresholding.

    A zero-variance plane carries no vegetation signal and yields an all-zero
    mask.
    """
    plane = np.asarray(exg_plane, dtype=np.float64)
    t = otsu_threshold(plane)
    if t is None:
        return np.zeros(plane.shape, dtype=np.uint8)
    levels = np.rint(plane * 255.0).astype(np.int64)
    return (levels >= t).astype(np.uint8)
