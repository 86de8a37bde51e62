import numpy as np
import pytest

from fieldbench.metrics import (
    ConfusionMatrix,
    MetricsSummary,
    mean_accuracy,
    mean_iou,
    precision_recall,
    report_csv,
    report_table,
    summarize,
)


def cm_from(pred, truth, n=3):
    cm = ConfusionMatrix(n)
    cm.accumulate(np.asarray(pred), np.asarray(truth))
    return cm


def two_class_example():
    # truth [0,0,1,1], pred [0,1,1,1] -> [[1,1],[0,2]]
    return cm_from([0, 1, 1, 1], [0, 0, 1, 1], n=2)


class TestAccumulate:
    def test_perfect_prediction_only_diagonal(self):
        cm = cm_from([0, 1, 2, 1], [0, 1, 2, 1])
        assert np.trace(cm.counts) == 4
        assert cm.counts.sum() == 4

    def test_hand_counts(self):
        cm = two_class_example()
        np.testing.assert_array_equal(cm.counts, [[1, 1], [0, 2]])

    def test_empty_masks_no_change(self):
        cm = ConfusionMatrix(3)
        cm.accumulate(np.zeros((0,)), np.zeros((0,)))
        assert cm.total == 0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            ConfusionMatrix(3).accumulate(np.zeros((2, 2)), np.zeros((3, 2)))

    def test_additive_and_order_independent(self):
        rng = np.random.default_rng(0)
        pred = rng.integers(0, 3, size=(40,))
        truth = rng.integers(0, 3, size=(40,))
        whole = cm_from(pred, truth)
        parts = ConfusionMatrix(3)
        parts.accumulate(pred[:17], truth[:17])
        parts.accumulate(pred[17:], truth[17:])
        np.testing.assert_array_equal(whole.counts, parts.counts)
        reversed_parts = ConfusionMatrix(3)
        reversed_parts.accumulate(pred[17:], truth[17:])
        reversed_parts.accumulate(pred[:17], truth[:17])
        np.testing.assert_array_equal(whole.counts, reversed_parts.counts)


class TestPrecisionRecall:
    def test_perfect(self):
        cm = cm_from([0, 1, 2], [0, 1, 2])
        precision, recall = precision_recall(cm)
        np.testing.assert_allclose(precision, 1.0)
        np.testing.assert_allclose(recall, 1.0)

    def test_hand_arithmetic(self):
        precision, recall = precision_recall(two_class_example())
        assert precision[0] == pytest.approx(1.0)
        assert recall[0] == pytest.approx(0.5)
        assert precision[1] == pytest.approx(2 / 3)
        assert recall[1] == pytest.approx(1.0)

    def test_absent_class_convention(self):
        cm = cm_from([0, 0], [0, 0])  # classes 1 and 2 never appear
        precision, recall = precision_recall(cm)
        assert precision[1] == recall[1] == 1.0
        assert precision[2] == recall[2] == 1.0

    def test_zero_over_positive_is_zero(self):
        cm = cm_from([1, 1], [0, 0])  # class 0 always mispredicted
        precision, recall = precision_recall(cm)
        assert recall[0] == 0.0
        assert precision[1] == 0.0


class TestIoUAndAccuracy:
    def test_perfect_iou(self):
        assert mean_iou(cm_from([0, 1, 2], [0, 1, 2])) == 1.0

    def test_hand_iou(self):
        assert mean_iou(two_class_example()) == pytest.approx(0.58333, abs=1e-5)

    def test_all_wrong_is_zero(self):
        cm = cm_from([1, 0], [0, 1], n=2)
        assert mean_iou(cm) == 0.0

    def test_iou_bounded_by_mean_recall(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            pred = rng.integers(0, 3, size=(60,))
            truth = rng.integers(0, 3, size=(60,))
            cm = cm_from(pred, truth)
            _, recall = precision_recall(cm)
            assert mean_iou(cm) <= recall.mean() + 1e-12

    def test_accuracy_trace_over_total(self):
        assert mean_accuracy(two_class_example()) == pytest.approx(0.75)

    def test_accuracy_perfect(self):
        assert mean_accuracy(cm_from([0, 1, 2], [0, 1, 2])) == 1.0

    def test_uniform_random_three_class_accuracy_near_third(self):
        rng = np.random.default_rng(2)
        truth = rng.integers(0, 3, size=300_000)
        pred = rng.integers(0, 3, size=300_000)
        assert mean_accuracy(cm_from(pred, truth)) == pytest.approx(1 / 3, abs=0.01)

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            mean_accuracy(ConfusionMatrix(3))

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(3)
        pred = rng.integers(0, 3, size=(500,))
        truth = rng.integers(0, 3, size=(500,))
        base = cm_from(pred, truth)
        perm = np.array([2, 0, 1])
        permuted = cm_from(perm[pred], perm[truth])
        assert mean_iou(base) == pytest.approx(mean_iou(permuted))
        assert mean_accuracy(base) == pytest.approx(mean_accuracy(permuted))
        p0, r0 = precision_recall(base)
        p1, r1 = precision_recall(permuted)
        np.testing.assert_allclose(p0, p1[perm])
        np.testing.assert_allclose(r0, r1[perm])


class TestReport:
    def test_published_row_renders_verbatim(self):
        summary = MetricsSummary(
            maccuracy=0.9947,
            miou=0.9803,
            precision=(0.9995, 0.8584, 0.3608),  # by class index: soil, crop, weed
            recall=(0.9958, 0.9386, 0.6168),
            mean_class_recall=(0.9958 + 0.9386 + 0.6168) / 3,
        )
        table = report_table(summary)
        row = table.splitlines()[2]
        cells = row.split()[2:]  # drop the label column
        assert cells == [
            "99.47", "98.03",
            "99.95", "36.08", "85.84",  # precision: soil, weed, crop
            "99.58", "61.68", "93.86",  # recall: soil, weed, crop
        ]

    def test_perfect_metrics_all_hundred(self):
        cm = cm_from([0, 1, 2], [0, 1, 2])
        table = report_table(summarize(cm))
        cells = table.splitlines()[2].split()[2:]
        assert cells == ["100.00"] * 8

    def test_report_matches_component_metrics(self):
        pred = np.array([0, 1, 1, 1, 2, 2])
        truth = np.array([0, 0, 1, 1, 2, 1])
        cm = cm_from(pred, truth)
        s = summarize(cm)
        precision, recall = precision_recall(cm)
        assert s.precision == pytest.approx(tuple(precision))
        assert s.recall == pytest.approx(tuple(recall))
        cells = report_table(s).splitlines()[2].split()[2:]
        assert cells[0] == f"{100 * mean_accuracy(cm):.2f}"
        assert cells[1] == f"{100 * mean_iou(cm):.2f}"
        assert cells[2] == f"{100 * precision[0]:.2f}"
        assert cells[3] == f"{100 * precision[2]:.2f}"
        assert cells[4] == f"{100 * precision[1]:.2f}"

    def test_csv_shape(self):
        cm = cm_from([0, 1, 2], [0, 1, 2])
        text = report_csv(summarize(cm))
        header, row = text.strip().split("\n")
        assert len(header.split(",")) == len(row.split(",")) == 8
        assert all(0.0 <= float(v) <= 100.0 for v in row.split(","))
