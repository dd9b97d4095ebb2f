import math

import numpy as np
import pytest

from panofourier.metrics import ConfusionMatrix, DepthAccumulator, MetricsReport, depth_metrics, seg_metrics


def test_depth_metrics_of_perfect_prediction():
    gt = np.random.default_rng(0).uniform(0.5, 8.0, size=(2, 1, 4, 8))
    values = depth_metrics(gt, gt)
    assert [values[name] for name in ("mre", "mae", "rmse", "rmse_log")] == [0.0, 0.0, 0.0, 0.0]
    assert [values[name] for name in ("delta1", "delta2", "delta3")] == [1.0, 1.0, 1.0]


def test_depth_metrics_hand_example():
    values = depth_metrics(np.array([2.0, 4.0]), np.array([1.0, 4.0]))
    assert values["mre"] == pytest.approx(0.5)
    assert values["mae"] == pytest.approx(0.5)
    assert values["rmse"] == pytest.approx(math.sqrt(0.5))
    assert values["rmse_log"] == pytest.approx(math.log(2.0) / math.sqrt(2.0))
    # a ratio of 2 exceeds 1.25, 1.5625 and 1.953125
    assert (values["delta1"], values["delta2"], values["delta3"]) == (0.5, 0.5, 0.5)


def test_depth_metrics_uniform_scale():
    gt = np.random.default_rng(1).uniform(1.0, 4.0, size=50)
    values = depth_metrics(1.2 * gt, gt)
    assert values["delta1"] == 1.0
    assert values["mre"] == pytest.approx(0.2)


@pytest.mark.parametrize("scale", [0.5, 3.0, 10.0])
def test_rmse_log_is_scale_invariant(scale):
    rng = np.random.default_rng(2)
    gt = rng.uniform(0.5, 6.0, size=100)
    pred = rng.uniform(0.5, 6.0, size=100)
    assert depth_metrics(scale * pred, scale * gt)["rmse_log"] == pytest.approx(depth_metrics(pred, gt)["rmse_log"])


def test_depth_metrics_under_joint_scaling():
    rng = np.random.default_rng(7)
    for _ in range(200):
        gt = rng.uniform(0.1, 10.0, size=64)
        pred = gt * rng.uniform(0.5, 2.0, size=64)
        scale = rng.uniform(0.01, 100.0)
        plain, scaled = depth_metrics(pred, gt), depth_metrics(scale * pred, scale * gt)
        for name in ("mre", "rmse_log", "delta1", "delta2", "delta3"):
            assert scaled[name] == pytest.approx(plain[name], abs=1e-12)
        assert scaled["mae"] == pytest.approx(scale * plain["mae"], rel=1e-12)
        assert scaled["rmse"] == pytest.approx(scale * plain["rmse"], rel=1e-12)


def test_rmse_log_base_ten():
    values = depth_metrics(np.array([10.0]), np.array([1.0]), log_base="10")
    assert values["rmse_log"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        DepthAccumulator("2")


def test_zero_depth_prediction_is_guarded():
    values = depth_metrics(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
    assert math.isfinite(values["rmse_log"])
    assert values["rmse_log"] == pytest.approx(math.log(1e6) / math.sqrt(2.0))
    assert values["delta1"] == 0.5


def test_depth_metrics_skip_invalid_and_zero_ground_truth():
    pred = np.array([1.0, 5.0, 9.0])
    gt = np.array([1.0, 0.0, 3.0])
    assert depth_metrics(pred, gt)["mae"] == pytest.approx(3.0)
    assert depth_metrics(pred, gt, np.array([True, True, False]))["mae"] == 0.0
    with pytest.raises(ValueError, match="empty"):
        depth_metrics(pred, gt, np.array([False, True, False]))


def test_deltas_are_monotone():
    rng = np.random.default_rng(3)
    gt = rng.uniform(1.0, 5.0, size=200)
    values = depth_metrics(gt * rng.uniform(0.4, 2.5, size=200), gt)
    assert values["delta1"] <= values["delta2"] <= values["delta3"] <= 1.0


def test_depth_accumulator_merge_matches_single_pass():
    rng = np.random.default_rng(4)
    gt = rng.uniform(1.0, 5.0, size=(4, 16))
    pred = rng.uniform(1.0, 5.0, size=(4, 16))
    first, second = DepthAccumulator(), DepthAccumulator()
    first.add(pred[:2], gt[:2])
    second.add(pred[2:], gt[2:])
    merged = first.merge(second).result()
    for name, value in depth_metrics(pred, gt).items():
        assert merged[name] == pytest.approx(value)


def test_seg_metrics_of_perfect_prediction():
    labels = np.random.default_rng(5).integers(1, 7, size=(2, 8, 16))
    values = seg_metrics(labels, labels, 7)
    assert values["miou"] == 1.0
    assert values["macc"] == 1.0
    assert math.isnan(values["per_class_iou"][0])


def test_seg_metrics_hand_example():
    gt = np.array([[1, 1, 2, 2]])
    pred = np.ones_like(gt)
    values = seg_metrics(pred, gt, 3)
    assert values["per_class_iou"][1:].tolist() == [0.5, 0.0]
    assert values["per_class_acc"][1:].tolist() == [1.0, 0.0]
    assert values["miou"] == pytest.approx(0.25)
    assert values["macc"] == pytest.approx(0.5)


def test_unknown_ground_truth_pixels_do_not_count():
    rng = np.random.default_rng(6)
    gt = rng.integers(0, 7, size=(16, 32))
    pred = rng.integers(0, 7, size=(16, 32))
    relabelled = pred.copy()
    relabelled[gt == 0] = rng.integers(0, 7, size=int((gt == 0).sum()))
    first, second = seg_metrics(pred, gt, 7), seg_metrics(relabelled, gt, 7)
    assert first["miou"] == second["miou"]
    assert first["macc"] == second["macc"]


def test_ignore_label_is_skipped():
    gt = np.array([1, 255, 2])
    pred = np.array([1, 1, 2])
    confusion = ConfusionMatrix(3)
    confusion.add(pred, gt)
    assert confusion.matrix.sum() == 2
    assert confusion.result()["miou"] == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_confusion_matrix_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    gt = rng.integers(0, 5, size=300)
    pred = rng.integers(0, 5, size=300)
    confusion = ConfusionMatrix(5, unknown_class_id=None)
    confusion.add(pred, gt)
    expected = np.zeros((5, 5), dtype=np.int64)
    for g, p in zip(gt, pred):
        expected[g, p] += 1
    np.testing.assert_array_equal(confusion.matrix, expected)

    iou = confusion.result()["per_class_iou"]
    for c in range(5):
        union = np.sum((gt == c) | (pred == c))
        assert iou[c] == pytest.approx(np.sum((gt == c) & (pred == c)) / union)


def test_confusion_matrix_merge():
    first, second = ConfusionMatrix(3), ConfusionMatrix(3)
    first.add(np.array([1, 2]), np.array([1, 1]))
    second.add(np.array([2]), np.array([2]))
    np.testing.assert_array_equal(first.merge(second).matrix, [[0, 0, 0], [0, 1, 1], [0, 0, 1]])
    with pytest.raises(ValueError):
        first.add(np.array([1]), np.array([1, 2]))


def make_report() -> MetricsReport:
    gt_depth = np.array([1.0, 2.0, 4.0])
    gt_labels = np.array([[1, 1, 2, 2]])
    return MetricsReport(
        depth=depth_metrics(np.array([1.0, 2.5, 4.0]), gt_depth),
        segmentation=seg_metrics(np.ones_like(gt_labels), gt_labels, 3),
        depth_pixels=3,
        label_pixels=4,
        class_names=["unknown", "wall", "floor"],
    )


def test_metrics_report_json_roundtrip(tmp_path):
    report = make_report()
    report.write(tmp_path / "reports" / "metrics.json")
    loaded = MetricsReport.from_json(tmp_path / "reports" / "metrics.json")
    assert loaded.to_dict() == report.to_dict()
    assert loaded.per_class_iou[0] is None
    with pytest.raises(FileNotFoundError):
        MetricsReport.from_json(tmp_path / "missing.json")


def test_metrics_report_scores():
    report = make_report()
    assert report.score("semantic_only") == pytest.approx(0.25)
    assert report.score("depth_only") == pytest.approx(-report.mre)
    assert report.score("joint") == pytest.approx(0.25 - report.mre)
    assert MetricsReport().score("depth_only") == -math.inf
    with pytest.raises(ValueError):
        report.score("best")


def recount(pred, gt, num_classes):
    counted = gt != 0
    ious, accs = [], []
    for c in range(1, num_classes):
        in_gt = counted & (gt == c)
        if not in_gt.any():
            continue
        in_pred = counted & (pred == c)
        hits = np.sum(in_gt & in_pred)
        ious.append(hits / np.sum(in_gt | in_pred))
        accs.append(hits / np.sum(in_gt))
    return np.mean(ious), np.mean(accs)


def test_seg_metrics_match_a_pixel_recount():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        gt = rng.integers(0, 7, size=(16, 32))
        pred = rng.integers(0, 7, size=(16, 32))
        values = seg_metrics(pred, gt, 7)
        miou, macc = recount(pred, gt, 7)
        assert values["miou"] == pytest.approx(miou, abs=1e-12)
        assert values["macc"] == pytest.approx(macc, abs=1e-12)
