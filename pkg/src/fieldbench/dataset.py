"""Image/mask dataset ingestion from a directory tree.

Expected layout: a root directory with `images/` and `masks/` subdirectories
holding PNG (or PPM) files paired by filename stem. Masks are index images
with 0 = soil, 1 = crop, 2 = weed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .imgio import read_mask, read_rgb

_IMAGE_SUFFIXES = {".png", ".ppm"}


def load_pairs(root: str | Path) -> list[tuple[np.ndarray, np.ndarray]]:
    """Load all (rgb, mask) pairs under root, sorted by stem."""
    root = Path(root)
    img_dir = root / "images"
    mask_dir = root / "masks"
    if not img_dir.is_dir() or not mask_dir.is_dir():
        raise FileNotFoundError(
            f"dataset root {root} must contain images/ and masks/ subdirectories"
        )
    images = {
        p.stem: p for p in sorted(img_dir.iterdir()) if p.suffix.lower() in _IMAGE_SUFFIXES
    }
    if not images:
        raise FileNotFoundError(f"no images found under {img_dir}")
    pairs = []
    for stem, img_path in images.items():
        candidates = [mask_dir / (stem + s) for s in (".png", ".ppm")]
        mask_path = next((c for c in candidates if c.exists()), None)
        if mask_path is None:
            raise FileNotFoundError(f"no mask found for image {img_path.name} under {mask_dir}")
        rgb = read_rgb(img_path)
        mask = read_mask(mask_path)
        if rgb.shape[:2] != mask.shape:
            raise ValueError(
                f"image/mask size mismatch for {stem}: {rgb.shape[:2]} vs {mask.shape}"
            )
        pairs.append((rgb, mask))
    return pairs


def save_pairs(root: str | Path, pairs: list[tuple[np.ndarray, np.ndarray]]) -> None:
    """Write (rgb, mask) pairs under root in the layout load_pairs expects."""
    from .imgio import write_mask, write_rgb

    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "masks").mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(pairs))))
    for i, (rgb, mask) in enumerate(pairs):
        stem = f"{i:0{width}d}"
        write_rgb(root / "images" / f"{stem}.png", rgb)
        write_mask(root / "masks" / f"{stem}.png", mask)
