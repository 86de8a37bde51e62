"""Confusion-matrix evaluation: pixel accuracy, mean IoU, per-class precision/recall.

Rows are the true class, columns the predicted class. The 0/0 convention is
fixed so a perfect prediction scores all ones: a class that never occurs and
is never predicted gets precision = recall = IoU = 1; a zero numerator over a
positive denominator gives 0.

"mAccuracy" in the text report is overall pixel accuracy (trace / total);
mean per-class recall is printed alongside as a secondary line since both
readings of the name are common.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLASS_LABELS = ("Soil", "Crop", "Weed")

#: Report column order by class index (soil=0, weed=2, crop=1).
_REPORT_ORDER = (0, 2, 1)


class ConfusionMatrix:
    """Integer class-confusion counts; mergeable across image shards."""

    def __init__(self, n_classes: int = 3):
        if n_classes < 1:
            raise ValueError(f"n_classes must be >= 1, got {n_classes!r}")
        self.n_classes = n_classes
        self.counts = np.zeros((n_classes, n_classes), dtype=np.int64)

    def accumulate(self, pred: np.ndarray, truth: np.ndarray) -> "ConfusionMatrix":
        """Count every pixel of a prediction against its ground truth."""
        pred = np.asarray(pred)
        truth = np.asarray(truth)
        if pred.shape != truth.shape:
            raise ValueError(f"shape mismatch: pred {pred.shape} vs truth {truth.shape}")
        if pred.size == 0:
            return self
        flat = self.n_classes * truth.astype(np.int64).ravel() + pred.astype(np.int64).ravel()
        if flat.min() < 0 or flat.max() >= self.n_classes**2:
            raise ValueError(f"labels outside [0, {self.n_classes})")
        self.counts += np.bincount(flat, minlength=self.n_classes**2).reshape(
            self.n_classes, self.n_classes
        )
        return self

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.n_classes != self.n_classes:
            raise ValueError("cannot merge confusion matrices of different sizes")
        self.counts += other.counts
        return self

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 -> 1 (absent class), 0/positive -> 0.
    out = np.ones_like(num, dtype=np.float64)
    pos = den > 0
    out[pos] = num[pos] / den[pos]
    return out


def precision_recall(cm: ConfusionMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Per-class (precision, recall) with the documented 0/0 -> 1 convention."""
    tp = np.diag(cm.counts).astype(np.float64)
    predicted = cm.counts.sum(axis=0).astype(np.float64)
    actual = cm.counts.sum(axis=1).astype(np.float64)
    return _safe_ratio(tp, predicted), _safe_ratio(tp, actual)


def mean_iou(cm: ConfusionMatrix) -> float:
    """Mean over classes of TP / (TP + FP + FN), 0/0 -> 1."""
    tp = np.diag(cm.counts).astype(np.float64)
    union = cm.counts.sum(axis=0) + cm.counts.sum(axis=1) - np.diag(cm.counts)
    return float(_safe_ratio(tp, union.astype(np.float64)).mean())


def mean_accuracy(cm: ConfusionMatrix) -> float:
    """Overall pixel accuracy: trace / total."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm.counts) / cm.total)


def mean_class_recall(cm: ConfusionMatrix) -> float:
    _, recall = precision_recall(cm)
    return float(recall.mean())


@dataclass(frozen=True)
class MetricsSummary:
    """Everything the evaluation report prints, as fractions in [0, 1]."""

    maccuracy: float
    miou: float
    precision: tuple[float, float, float]  # by class index: soil, crop, weed
    recall: tuple[float, float, float]
    mean_class_recall: float


def summarize(cm: ConfusionMatrix) -> MetricsSummary:
    if cm.n_classes != 3:
        raise ValueError("summary report expects the 3-class soil/crop/weed matrix")
    precision, recall = precision_recall(cm)
    return MetricsSummary(
        maccuracy=mean_accuracy(cm),
        miou=mean_iou(cm),
        precision=tuple(precision.tolist()),
        recall=tuple(recall.tolist()),
        mean_class_recall=mean_class_recall(cm),
    )


def report_table(s: MetricsSummary) -> str:
    """Fixed-order text table, two decimals, percentages.

    Columns: mAccuracy [%], mIoU [%], then precision and recall for
    Soil / Weed / Crop.
    """
    header_1 = (
        f"{'Model':<12} {'mAccuracy [%]':>13} {'mIoU [%]':>9} "
        f"{'Precision [%]':>27} {'Recall [%]':>27}"
    )
    class_cols = " ".join(f"{CLASS_LABELS[i]:>8}" for i in _REPORT_ORDER)
    header_2 = f"{'':<12} {'':>13} {'':>9} {class_cols} {class_cols}"
    prec = " ".join(f"{100.0 * s.precision[i]:>8.2f}" for i in _REPORT_ORDER)
    rec = " ".join(f"{100.0 * s.recall[i]:>8.2f}" for i in _REPORT_ORDER)
    row = f"{'This run':<12} {100.0 * s.maccuracy:>13.2f} {100.0 * s.miou:>9.2f} {prec} {rec}"
    secondary = f"mean per-class recall: {100.0 * s.mean_class_recall:.2f} %"
    return "\n".join([header_1, header_2, row, secondary])


def report_csv(s: MetricsSummary) -> str:
    """One CSV header + row matching the text table's column order."""
    cols = ["maccuracy_pct", "miou_pct"]
    cols += [f"precision_{CLASS_LABELS[i].lower()}_pct" for i in _REPORT_ORDER]
    cols += [f"recall_{CLASS_LABELS[i].lower()}_pct" for i in _REPORT_ORDER]
    vals = [100.0 * s.maccuracy, 100.0 * s.miou]
    vals += [100.0 * s.precision[i] for i in _REPORT_ORDER]
    vals += [100.0 * s.recall[i] for i in _REPORT_ORDER]
    return ",".join(cols) + "\n" + ",".join(f"{v:.2f}" for v in vals) + "\n"
