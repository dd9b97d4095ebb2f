"""Depth and segmentation metrics, accumulated as sums of counts so that
batches can be evaluated separately and reduced."""

import json
import logging
import math
import typing
from pathlib import Path

import numpy as np

from ..utils.data_classes import TRAINING_MODES

logger = logging.getLogger("general_logger")

LOG_EPS = 1e-6
DELTA_BASE = 1.25
DEPTH_FIELDS = ("mre", "mae", "rmse", "rmse_log", "delta1", "delta2", "delta3")


class DepthAccumulator:
    """Running sums of the per-pixel depth errors.

    RMSElog compares log(max(p, 1e-6)) with log(max(g, 1e-6)) instead of
    log(p + eps) - log(g + eps). Depths above 1e-6 are untouched, so the
    metric is exactly invariant to a common rescaling; a zero prediction
    costs |log(1e-6) - log(g)|.
    """

    def __init__(self, log_base: str = "natural"):
        if log_base not in ("natural", "10"):
            raise ValueError(f"log base should be 'natural' or '10', not {log_base!r}")
        self.log_base = log_base
        self.count = 0
        self.abs_rel = 0.0
        self.abs = 0.0
        self.squared = 0.0
        self.squared_log = 0.0
        self.deltas = np.zeros(3, dtype=np.int64)

    def _log(self, values: np.ndarray) -> np.ndarray:
        guarded = np.maximum(values, LOG_EPS)
        return np.log(guarded) if self.log_base == "natural" else np.log10(guarded)

    def add(self, pred: np.ndarray, gt: np.ndarray, valid_mask: typing.Optional[np.ndarray] = None):
        pred = np.asarray(pred, dtype=np.float64)
        gt = np.asarray(gt, dtype=np.float64)
        if pred.shape != gt.shape:
            raise ValueError(f"depth prediction {pred.shape} and ground truth {gt.shape} differ in shape")
        valid = gt > 0
        if valid_mask is not None:
            valid &= np.asarray(valid_mask, dtype=bool)
        p, g = pred[valid], gt[valid]
        difference = p - g
        self.count += int(p.size)
        self.abs_rel += float(np.sum(np.abs(difference) / g))
        self.abs += float(np.sum(np.abs(difference)))
        self.squared += float(np.sum(difference * difference))
        self.squared_log += float(np.sum((self._log(p) - self._log(g)) ** 2))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.maximum(p / g, g / p)
        ratio = np.where(np.isfinite(ratio), ratio, np.inf)
        for n in range(3):
            self.deltas[n] += int(np.sum(ratio < DELTA_BASE ** (n + 1)))

    def merge(self, other: "DepthAccumulator") -> "DepthAccumulator":
        self.count += other.count
        self.abs_rel += other.abs_rel
        self.abs += other.abs
        self.squared += other.squared
        self.squared_log += other.squared_log
        self.deltas += other.deltas
        return self

    def result(self) -> typing.Dict[str, float]:
        if self.count == 0:
            raise ValueError("depth metrics over an empty set of valid pixels")
        n = self.count
        return {
            "mre": self.abs_rel / n,
            "mae": self.abs / n,
            "rmse": math.sqrt(self.squared / n),
            "rmse_log": math.sqrt(self.squared_log / n),
            "delta1": float(self.deltas[0]) / n,
            "delta2": float(self.deltas[1]) / n,
            "delta3": float(self.deltas[2]) / n,
        }


class ConfusionMatrix:
    """C x C counts indexed [ground truth, prediction].

    Pixels whose ground truth is the unknown class or outside [0, C) are
    not counted.
    """

    def __init__(self, num_classes: int, unknown_class_id: typing.Optional[int] = 0):
        self.num_classes = num_classes
        self.unknown_class_id = unknown_class_id
        self.matrix = np.zeros((num_classes, num_classes), dtype=np.int64)

    def add(self, pred_labels: np.ndarray, gt_labels: np.ndarray):
        pred = np.asarray(pred_labels).astype(np.int64)
        gt = np.asarray(gt_labels).astype(np.int64)
        if pred.shape != gt.shape:
            raise ValueError(f"predicted labels {pred.shape} and ground truth {gt.shape} differ in shape")
        index = (gt >= 0) & (gt < self.num_classes) & (pred >= 0) & (pred < self.num_classes)
        if self.unknown_class_id is not None:
            index &= gt != self.unknown_class_id
        flat = self.num_classes * gt[index] + pred[index]
        self.matrix += np.bincount(flat, minlength=self.num_classes**2).reshape(self.num_classes, self.num_classes)

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        self.matrix += other.matrix
        return self

    def result(self) -> typing.Dict[str, typing.Any]:
        tp = np.diag(self.matrix).astype(np.float64)
        gt_count = self.matrix.sum(axis=1).astype(np.float64)
        pred_count = self.matrix.sum(axis=0).astype(np.float64)
        present = gt_count > 0
        if self.unknown_class_id is not None and 0 <= self.unknown_class_id < self.num_classes:
            present[self.unknown_class_id] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            iou = np.where(present, tp / (gt_count + pred_count - tp), np.nan)
            acc = np.where(present, tp / gt_count, np.nan)
        return {
            "per_class_iou": iou,
            "per_class_acc": acc,
            "miou": float(iou[present].mean()) if present.any() else None,
            "macc": float(acc[present].mean()) if present.any() else None,
        }


def depth_metrics(
    pred: np.ndarray, gt: np.ndarray, valid_mask: typing.Optional[np.ndarray] = None, log_base: str = "natural"
) -> typing.Dict[str, float]:
    """MRE, MAE, RMSE, RMSElog and delta^1..3 over pixels that are valid and have gt > 0.

    RMSElog clamps both depths to at least 1e-6 before the logarithm rather
    than adding an epsilon, which keeps it exactly invariant to a common
    rescaling of pred and gt. A zero prediction against gt = 1 contributes
    log(1e6) to the root mean square.
    """
    accumulator = DepthAccumulator(log_base)
    accumulator.add(pred, gt, valid_mask)
    return accumulator.result()


def seg_metrics(
    pred_labels: np.ndarray, gt_labels: np.ndarray, num_classes: int, unknown_class_id: typing.Optional[int] = 0
) -> typing.Dict[str, typing.Any]:
    """Per-class IoU and accuracy and their means over the classes present in gt."""
    confusion = ConfusionMatrix(num_classes, unknown_class_id)
    confusion.add(pred_labels, gt_labels)
    return confusion.result()


def _nan_to_none(values) -> typing.List[typing.Optional[float]]:
    return [None if v is None or (isinstance(v, float) and math.isnan(v)) else float(v) for v in values]


class MetricsReport:
    """Evaluation results of one split.

    Args:
        depth (dict, optional): Output of ``depth_metrics``.
        segmentation (dict, optional): Output of ``seg_metrics``.
        depth_pixels (int, optional): Valid depth pixels counted.
        label_pixels (int, optional): Labelled pixels counted.
        class_names (typing.Sequence[str], optional): Names for the per-class entries.
    """

    def __init__(
        self,
        depth: typing.Optional[dict] = None,
        segmentation: typing.Optional[dict] = None,
        depth_pixels: int = 0,
        label_pixels: int = 0,
        class_names: typing.Optional[typing.Sequence[str]] = None,
    ):
        depth = depth or {}
        segmentation = segmentation or {}
        for name in DEPTH_FIELDS:
            setattr(self, name, depth.get(name))
        self.per_class_iou = _nan_to_none(segmentation.get("per_class_iou", []))
        self.per_class_acc = _nan_to_none(segmentation.get("per_class_acc", []))
        self.miou = segmentation.get("miou")
        self.macc = segmentation.get("macc")
        self.depth_pixels = depth_pixels
        self.label_pixels = label_pixels
        self.class_names = list(class_names) if class_names is not None else None

    @classmethod
    def from_accumulators(
        cls,
        depth: typing.Optional[DepthAccumulator],
        confusion: typing.Optional[ConfusionMatrix],
        class_names=None,
    ) -> "MetricsReport":
        return cls(
            depth=depth.result() if depth is not None and depth.count else None,
            segmentation=confusion.result() if confusion is not None else None,
            depth_pixels=depth.count if depth is not None else 0,
            label_pixels=int(confusion.matrix.sum()) if confusion is not None else 0,
            class_names=class_names,
        )

    def to_dict(self) -> dict:
        values = {name: getattr(self, name) for name in DEPTH_FIELDS}
        values.update(
            {
                "per_class_iou": self.per_class_iou,
                "per_class_acc": self.per_class_acc,
                "miou": self.miou,
                "macc": self.macc,
                "depth_pixels": self.depth_pixels,
                "label_pixels": self.label_pixels,
            }
        )
        if self.class_names is not None:
            values["class_names"] = self.class_names
        return values

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write(self, filename: typing.Union[str, Path]):
        Path(filename).parent.mkdir(parents=True, exist_ok=True)
        with open(filename, "w") as f:
            f.write(self.to_json())
        logger.info(f"metrics report written to {filename}")

    @classmethod
    def from_json(cls, filename: typing.Union[str, Path]) -> "MetricsReport":
        if not Path(filename).exists():
            raise FileNotFoundError(f"report file {filename} not found")
        with open(filename) as f:
            values = json.load(f)
        report = cls(depth_pixels=values.get("depth_pixels", 0), label_pixels=values.get("label_pixels", 0))
        for name in DEPTH_FIELDS + ("per_class_iou", "per_class_acc", "miou", "macc", "class_names"):
            if name in values:
                setattr(report, name, values[name])
        return report

    def score(self, mode: str) -> float:
        """Checkpoint-selection score, higher is better."""
        if mode not in TRAINING_MODES:
            raise ValueError(f"training mode should be one of {TRAINING_MODES}, not {mode!r}")
        mre = self.mre if self.mre is not None else math.inf
        miou = self.miou if self.miou is not None else 0.0
        if mode == "depth_only":
            return -mre
        if mode == "semantic_only":
            return miou
        return miou - mre
