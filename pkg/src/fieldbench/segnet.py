"""Small encoder-decoder segmentation network with hand-rolled backprop.

Takes a (10, H, W) channel stack and produces per-pixel probabilities over
3 classes (0 = soil, 1 = crop, 2 = weed). The layer plan is fixed:

    conv3x3 10->8  + ReLU
    maxpool 2x2
    conv3x3 8->16  + ReLU
    maxpool 2x2
    conv3x3 16->8  + ReLU
    nearest-neighbor upsample x2
    conv3x3 8->8   + ReLU
    nearest-neighbor upsample x2
    conv1x1 8->3
    per-pixel softmax

All convolutions are same-padded, so the output mask matches the input size;
the two pool/upsample pairs require H and W divisible by 4. Total parameter
count is 3,667. Everything runs in float64 on numpy; gradients are exact for
both loss kinds and are checked against central finite differences in the
test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

N_CLASSES = 3
IN_CHANNELS = 10

#: (out_channels, in_channels, kernel_h, kernel_w) per conv layer.
LAYER_SHAPES = (
    (8, IN_CHANNELS, 3, 3),
    (16, 8, 3, 3),
    (8, 16, 3, 3),
    (8, 8, 3, 3),
    (N_CLASSES, 8, 1, 1),
)

#: Forward plan: conv layer index with ReLU flag, interleaved with resampling.
_PLAN = (
    ("conv", 0, True),
    ("pool",),
    ("conv", 1, True),
    ("pool",),
    ("conv", 2, True),
    ("up",),
    ("conv", 3, True),
    ("up",),
    ("conv", 4, False),
)

PROB_FLOOR = 1e-12

CHECKPOINT_FORMAT = "fieldbench-segnet"
CHECKPOINT_VERSION = 1


@dataclass
class SegNetParams:
    """Weights (out, in, kh, kw) and biases (out,) for each conv layer, in plan order."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "SegNetParams":
        return SegNetParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def allfinite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(b).all() for b in self.biases
        )


def param_count(p: SegNetParams) -> int:
    return sum(w.size for w in p.weights) + sum(b.size for b in p.biases)


def init_params(seed) -> SegNetParams:
    """Glorot-uniform weights, zero biases, deterministic per seed."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for out_c, in_c, kh, kw in LAYER_SHAPES:
        fan_in = in_c * kh * kw
        fan_out = out_c * kh * kw
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(out_c, in_c, kh, kw)))
        biases.append(np.zeros(out_c))
    return SegNetParams(weights, biases)


def _check_input(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[0] != IN_CHANNELS:
        raise ValueError(f"expected a ({IN_CHANNELS}, H, W) stack, got shape {x.shape}")
    if x.shape[1] % 4 or x.shape[2] % 4:
        raise ValueError(
            "height and width must be divisible by 4 (two 2x2 poolings), "
            f"got {x.shape[1]}x{x.shape[2]}"
        )
    return x


def _im2col(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """Same-padded patch matrix (C*kh*kw, H*W), rows ordered (channel, dy, dx)."""
    c, h, w = x.shape
    ph, pw = kh // 2, kw // 2
    xp = np.pad(x, ((0, 0), (ph, ph), (pw, pw))) if (ph or pw) else x
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(1, 2))
    return windows.transpose(0, 3, 4, 1, 2).reshape(c * kh * kw, h * w)


def _conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    out_c, _, kh, kw = w.shape
    h, wid = x.shape[1], x.shape[2]
    cols = _im2col(x, kh, kw)
    out = (w.reshape(out_c, -1) @ cols + b[:, None]).reshape(out_c, h, wid)
    return out, cols


def _conv_backward(g: np.ndarray, w: np.ndarray, cols: np.ndarray, x_shape):
    out_c, in_c, kh, kw = w.shape
    _, h, wid = x_shape
    g2 = g.reshape(out_c, -1)
    db = g2.sum(axis=1)
    dw = (g2 @ cols.T).reshape(w.shape)
    dcols = w.reshape(out_c, -1).T @ g2
    ph, pw = kh // 2, kw // 2
    dxp = np.zeros((in_c, h + 2 * ph, wid + 2 * pw))
    i = 0
    for c in range(in_c):
        for dy in range(kh):
            for dx in range(kw):
                dxp[c, dy : dy + h, dx : dx + wid] += dcols[i].reshape(h, wid)
                i += 1
    dx = dxp[:, ph : ph + h, pw : pw + wid] if (ph or pw) else dxp
    return dw, db, dx


def _pool_forward(x: np.ndarray):
    c, h, w = x.shape
    win = x.reshape(c, h // 2, 2, w // 2, 2).transpose(0, 1, 3, 2, 4).reshape(c, h // 2, w // 2, 4)
    am = win.argmax(axis=-1)
    out = np.take_along_axis(win, am[..., None], axis=-1)[..., 0]
    return out, am


def _pool_backward(g: np.ndarray, am: np.ndarray, x_shape):
    c, h, w = x_shape
    gwin = np.zeros((c, h // 2, w // 2, 4))
    np.put_along_axis(gwin, am[..., None], g[..., None], axis=-1)
    return gwin.reshape(c, h // 2, w // 2, 2, 2).transpose(0, 1, 3, 2, 4).reshape(c, h, w)


def _up_forward(x: np.ndarray) -> np.ndarray:
    return x.repeat(2, axis=1).repeat(2, axis=2)


def _up_backward(g: np.ndarray) -> np.ndarray:
    c, h2, w2 = g.shape
    return g.reshape(c, h2 // 2, 2, w2 // 2, 2).sum(axis=(2, 4))


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=0, keepdims=True))
    return e / e.sum(axis=0, keepdims=True)


def forward(p: SegNetParams, x: np.ndarray) -> np.ndarray:
    """Per-pixel class probabilities (3, H, W) for a (10, H, W) stack."""
    x = _check_input(x)
    h = x
    for step in _PLAN:
        if step[0] == "conv":
            _, idx, relu = step
            h, _ = _conv_forward(h, p.weights[idx], p.biases[idx])
            if relu:
                np.maximum(h, 0.0, out=h)
        elif step[0] == "pool":
            h, _ = _pool_forward(h)
        else:
            h = _up_forward(h)
    return _softmax(h)


def _forward_cached(p: SegNetParams, x: np.ndarray):
    """Forward pass keeping everything backprop needs; returns (probs, tape)."""
    h = x
    tape = []
    for step in _PLAN:
        if step[0] == "conv":
            _, idx, relu = step
            x_shape = h.shape
            z, cols = _conv_forward(h, p.weights[idx], p.biases[idx])
            h = np.maximum(z, 0.0) if relu else z
            tape.append(("conv", idx, relu, cols, x_shape, z))
        elif step[0] == "pool":
            x_shape = h.shape
            h, am = _pool_forward(h)
            tape.append(("pool", am, x_shape))
        else:
            h = _up_forward(h)
            tape.append(("up",))
    return _softmax(h), tape


def _check_pred_target(probs: np.ndarray, target: np.ndarray) -> np.ndarray:
    target = np.asarray(target)
    if probs.shape != (N_CLASSES,) + target.shape:
        raise ValueError(
            f"probability map shape {probs.shape} does not match mask shape {target.shape}"
        )
    if target.min(initial=0) < 0 or target.max(initial=0) >= N_CLASSES:
        raise ValueError("mask contains labels outside {0, 1, 2}")
    return target.astype(np.intp)


def loss_cce(probs: np.ndarray, target: np.ndarray) -> float:
    """Mean categorical cross-entropy over pixels; probabilities floored at 1e-12."""
    target = _check_pred_target(probs, target)
    p_true = np.take_along_axis(probs, target[None], axis=0)[0]
    return float(-np.log(np.maximum(p_true, PROB_FLOOR)).mean())


def loss_wcce(probs: np.ndarray, target: np.ndarray, class_weights) -> float:
    """Class-weighted mean cross-entropy; weights indexed by the true class."""
    w = _check_weights(class_weights)
    target = _check_pred_target(probs, target)
    p_true = np.take_along_axis(probs, target[None], axis=0)[0]
    return float(-(w[target] * np.log(np.maximum(p_true, PROB_FLOOR))).mean())


def _check_weights(class_weights) -> np.ndarray:
    w = np.asarray(class_weights, dtype=np.float64)
    if w.shape != (N_CLASSES,):
        raise ValueError(f"expected {N_CLASSES} class weights, got shape {w.shape}")
    if (w <= 0).any():
        raise ValueError("class weights must all be > 0")
    return w


def class_weights_from_frequency(masks) -> np.ndarray:
    """Balanced inverse-frequency weights: w_c = N_total / (3 * n_c)."""
    counts = np.zeros(N_CLASSES, dtype=np.int64)
    for m in masks:
        counts += np.bincount(np.asarray(m).ravel(), minlength=N_CLASSES)[:N_CLASSES]
    for c in range(N_CLASSES):
        if counts[c] == 0:
            raise ValueError(f"class {c} has zero frequency")
    total = counts.sum()
    return total / (N_CLASSES * counts.astype(np.float64))


def _loss_and_grads(p: SegNetParams, x: np.ndarray, target: np.ndarray, loss: str, class_weights):
    x = _check_input(x)
    probs, tape = _forward_cached(p, x)
    target = _check_pred_target(probs, target)

    if loss == "cce":
        value = loss_cce(probs, target)
        pixel_scale = np.full(target.shape, 1.0 / target.size)
    elif loss == "wcce":
        w = _check_weights(class_weights)
        value = loss_wcce(probs, target, w)
        pixel_scale = w[target] / target.size
    else:
        raise ValueError(f"unknown loss kind {loss!r}, expected 'cce' or 'wcce'")

    # Softmax + cross-entropy collapse to (p - onehot) per pixel.
    g = probs.copy()
    rows, cols_idx = np.indices(target.shape)
    g[target, rows, cols_idx] -= 1.0
    g *= pixel_scale[None]

    dws: list = [None] * len(LAYER_SHAPES)
    dbs: list = [None] * len(LAYER_SHAPES)
    for record in reversed(tape):
        if record[0] == "conv":
            _, idx, relu, cols, x_shape, z = record
            if relu:
                g = g * (z > 0.0)
            dws[idx], dbs[idx], g = _conv_backward(g, p.weights[idx], cols, x_shape)
        elif record[0] == "pool":
            _, am, x_shape = record
            g = _pool_backward(g, am, x_shape)
        else:
            g = _up_backward(g)
    return value, SegNetParams(dws, dbs)


def backward(
    p: SegNetParams,
    x: np.ndarray,
    target: np.ndarray,
    loss: str = "cce",
    class_weights=None,
) -> SegNetParams:
    """Exact gradient of the chosen loss w.r.t. every parameter."""
    _, grads = _loss_and_grads(p, x, target, loss, class_weights)
    return grads


def sgd_step(p: SegNetParams, grads: SegNetParams, lr: float) -> SegNetParams:
    if lr < 0.0:
        raise ValueError(f"learning rate must be >= 0, got {lr!r}")
    return SegNetParams(
        [w - lr * g for w, g in zip(p.weights, grads.weights)],
        [b - lr * g for b, g in zip(p.biases, grads.biases)],
    )


def train(
    dataset,
    epochs: int,
    lr: float,
    loss: str = "cce",
    seed: int = 0,
    class_weights=None,
) -> tuple[SegNetParams, list[float]]:
    """Plain SGD (one image per step, reshuffled each epoch), deterministic per seed.

    dataset is a sequence of (stack, mask) pairs. For the weighted loss,
    class weights default to balanced inverse frequency over the dataset
    masks. Returns the trained parameters and the per-epoch mean loss.
    """
    items = list(dataset)
    if not items:
        raise ValueError("dataset is empty")
    if loss == "wcce" and class_weights is None:
        class_weights = class_weights_from_frequency([t for _, t in items])
    params = init_params(seed)
    rng = np.random.default_rng(seed)
    history: list[float] = []
    for _ in range(epochs):
        order = rng.permutation(len(items))
        epoch_losses = []
        for i in order:
            x, t = items[i]
            value, grads = _loss_and_grads(params, x, t, loss, class_weights)
            params = sgd_step(params, grads, lr)
            epoch_losses.append(value)
        history.append(float(np.mean(epoch_losses)))
    return params, history


def predict_mask(p: SegNetParams, x: np.ndarray) -> np.ndarray:
    """Per-pixel argmax of the class probabilities; ties break to the lowest class."""
    return forward(p, x).argmax(axis=0).astype(np.uint8)


def save_checkpoint(p: SegNetParams, path: str | Path) -> None:
    """Write parameters as versioned JSON: layer shapes plus one flat value list."""
    flat: list[float] = []
    layers = []
    for w, b in zip(p.weights, p.biases):
        layers.append({"weight_shape": list(w.shape), "bias_shape": list(b.shape)})
        flat.extend(w.ravel().tolist())
        flat.extend(b.ravel().tolist())
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layers": layers,
        "values": flat,
    }
    Path(path).write_text(json.dumps(payload))


def load_checkpoint(path: str | Path) -> SegNetParams:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {payload.get('version')!r}")
    shapes = [tuple(layer["weight_shape"]) for layer in payload["layers"]]
    if shapes != [tuple(s) for s in LAYER_SHAPES]:
        raise ValueError(f"{path}: layer shapes {shapes} do not match this architecture")
    values = np.asarray(payload["values"], dtype=np.float64)
    weights, biases = [], []
    pos = 0
    for out_c, in_c, kh, kw in LAYER_SHAPES:
        n_w = out_c * in_c * kh * kw
        weights.append(values[pos : pos + n_w].reshape(out_c, in_c, kh, kw))
        pos += n_w
        biases.append(values[pos : pos + out_c].copy())
        pos += out_c
    if pos != values.size:
        raise ValueError(f"{path}: expected {pos} values, found {values.size}")
    return SegNetParams(weights, biases)
