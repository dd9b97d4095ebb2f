"""Joint training objective: weighted cross-entropy, adaptive reverse Huber
depth loss with Sobel gradient terms, margin loss and per-class object loss."""

import logging
import typing

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor
from ..utils.data_classes import LossWeights

logger = logging.getLogger("general_logger")

THRESHOLD_FLOOR = 1e-6

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T.copy()


class LossBundle:
    """Loss terms of one batch and the thresholds that produced them.

    Args:
        l_seg, l_dep, l_mar, l_obj (Tensor): Scalar terms.
        l_total (Tensor): Weighted sum of the terms.
        c1 (float): Threshold of the depth-error term.
        c2 (float): Threshold of the Sobel-gradient terms.
    """

    def __init__(self, l_seg, l_dep, l_mar, l_obj, l_total, c1=None, c2=None):
        self.l_seg = l_seg
        self.l_dep = l_dep
        self.l_mar = l_mar
        self.l_obj = l_obj
        self.l_total = l_total
        self.c1 = c1
        self.c2 = c2

    def as_dict(self) -> typing.Dict[str, float]:
        values = {
            "l_seg": self.l_seg.item(),
            "l_dep": self.l_dep.item(),
            "l_mar": self.l_mar.item(),
            "l_obj": self.l_obj.item(),
            "l_total": self.l_total.item(),
        }
        if self.c1 is not None:
            values["c1"] = float(self.c1)
        if self.c2 is not None:
            values["c2"] = float(self.c2)
        return values


def _mask(mask, shape) -> np.ndarray:
    if mask is None:
        return np.ones(shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != shape:
        raise ValueError(f"mask of shape {mask.shape} does not match {shape}")
    return mask


def reverse_huber(errors: Tensor, c: float, mask: typing.Optional[np.ndarray] = None) -> Tensor:
    """Mean over ``mask`` of B_c(e): |e| up to c, (e^2 + c^2) / 2c beyond."""
    if not c > 0:
        raise ValueError(f"reverse Huber threshold must be positive, not {c}")
    mask = _mask(mask, errors.shape)
    count = int(mask.sum())
    if count == 0:
        raise ValueError("reverse Huber over an empty set of valid elements")
    magnitude = errors.abs()
    linear = magnitude.data <= c
    quadratic = (magnitude * magnitude + c * c) * (1.0 / (2.0 * c))
    per_element = magnitude * (linear & mask) + quadratic * (~linear & mask)
    return per_element.sum() * (1.0 / count)


def sobel(x: Tensor, padding_mode: str = "circular_h_replicate_v") -> typing.Tuple[Tensor, Tensor]:
    """Horizontal and vertical Sobel responses of a (B, 1, H, W) map."""
    kx = Tensor(SOBEL_X.reshape(1, 1, 3, 3))
    ky = Tensor(SOBEL_Y.reshape(1, 1, 3, 3))
    return F.conv2d(x, kx, padding_mode=padding_mode), F.conv2d(x, ky, padding_mode=padding_mode)


def window_valid(mask: np.ndarray, padding_mode: str = "circular_h_replicate_v") -> np.ndarray:
    """Pixels whose whole padded 3x3 window is valid."""
    invalid = F.pad_array((~mask).astype(np.float64), 1, 1, padding_mode)
    height, width = mask.shape[-2:]
    touched = np.zeros(mask.shape)
    for i in range(3):
        for j in range(3):
            touched += invalid[..., i : i + height, j : j + width]
    return mask & (touched == 0)


def _relative_threshold(values: np.ndarray, fraction: float) -> float:
    peak = float(values.max()) if values.size else 0.0
    return fraction * max(peak, THRESHOLD_FLOOR)


def depth_loss(
    pred: Tensor,
    gt: np.ndarray,
    valid_mask: typing.Optional[np.ndarray] = None,
    c1: typing.Optional[float] = None,
    c2: typing.Optional[float] = None,
    relative_threshold: float = 0.2,
    padding_mode: str = "circular_h_replicate_v",
) -> typing.Tuple[Tensor, float, float]:
    """B_c1(|pred - gt|) + B_c2(|Sobel_x diff|) + B_c2(|Sobel_y diff|).

    The thresholds are ``relative_threshold`` times the largest masked error
    of the batch, each maximum floored at 1e-6, and are constants for
    backpropagation. Passing ``c1``/``c2`` fixes them instead.

    Returns:
        tuple: The loss and the thresholds (c1, c2) used.
    """
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape or pred.ndim != 4 or pred.shape[1] != 1:
        raise ValueError(f"depth prediction {pred.shape} and ground truth {gt.shape} should both be (B, 1, H, W)")
    valid = _mask(valid_mask, gt.shape)
    if not valid.any():
        raise ValueError("depth loss over a batch without valid pixels")

    error = pred - gt
    if c1 is None:
        c1 = _relative_threshold(np.abs(error.data[valid]), relative_threshold)
    loss = reverse_huber(error, c1, valid)

    gx_pred, gy_pred = sobel(pred, padding_mode)
    gx_gt, gy_gt = sobel(Tensor(gt), padding_mode)
    grad_x = gx_pred - gx_gt
    grad_y = gy_pred - gy_gt
    windows = window_valid(valid, padding_mode)
    if c2 is None:
        both = np.concatenate([np.abs(grad_x.data[windows]), np.abs(grad_y.data[windows])])
        c2 = _relative_threshold(both, relative_threshold)
    if windows.any():
        loss = loss + reverse_huber(grad_x, c2, windows) + reverse_huber(grad_y, c2, windows)
    return loss, c1, c2


def margin_loss(
    pred: Tensor,
    gt: np.ndarray,
    valid_mask: typing.Optional[np.ndarray] = None,
    per_image: bool = False,
) -> Tensor:
    """((max gt - max pred)^2 + (min gt - min pred)^2) / 2 over the valid pixels.

    Extrema are taken over the whole batch, or per image and averaged.
    """
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ValueError(f"depth prediction {pred.shape} and ground truth {gt.shape} differ in shape")
    if pred.size == 0:
        raise ValueError("margin loss over an empty batch")
    valid = _mask(valid_mask, gt.shape)
    if per_image:
        rows = valid.reshape(gt.shape[0], -1)
        gt_rows = gt.reshape(gt.shape[0], -1)
        gt_max = np.where(rows, gt_rows, -np.inf).max(axis=1)
        gt_min = np.where(rows, gt_rows, np.inf).min(axis=1)
        upper = gt_max - pred.max(valid, per_sample=True)
        lower = gt_min - pred.min(valid, per_sample=True)
        return (upper * upper + lower * lower).mean() * 0.5
    upper = float(gt[valid].max()) - pred.max(valid)
    lower = float(gt[valid].min()) - pred.min(valid)
    return (upper * upper + lower * lower) * 0.5


def object_loss(
    pred: Tensor,
    gt: np.ndarray,
    gt_labels: np.ndarray,
    num_classes: int,
    valid_mask: typing.Optional[np.ndarray] = None,
) -> Tensor:
    """Mean over the classes present of the mean |pred - gt| on that class's pixels.

    Labels outside [0, num_classes) (the ignore label) never count.
    """
    gt = np.asarray(gt, dtype=np.float64)
    labels = np.asarray(gt_labels).reshape(gt.shape)
    valid = _mask(valid_mask, gt.shape)
    error = (pred - gt).abs()
    terms = []
    for class_id in range(num_classes):
        selected = valid & (labels == class_id)
        count = int(selected.sum())
        if count:
            terms.append((error * selected).sum() * (1.0 / count))
    if not terms:
        return Tensor(0.0)
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total * (1.0 / len(terms))


def seg_loss(logits: Tensor, gt_labels: np.ndarray, class_weights: np.ndarray, ignore_index: int = 255) -> Tensor:
    """Class-weighted cross-entropy normalized by the summed weights of the contributing pixels."""
    return F.weighted_cross_entropy(logits, gt_labels, class_weights, ignore_index)


def total_loss(
    components: typing.Sequence[Tensor],
    weights: LossWeights = LossWeights(),
    c1: typing.Optional[float] = None,
    c2: typing.Optional[float] = None,
) -> LossBundle:
    """Weighted sum of the (seg, depth, margin, object) terms."""
    if len(components) != 4:
        raise ValueError(f"total loss takes 4 components, got {len(components)}")
    terms = [c if isinstance(c, Tensor) else Tensor(c) for c in components]
    for name, term in zip(("seg", "depth", "margin", "object"), terms):
        if term.size != 1 or not np.isfinite(term.data).all():
            raise ValueError(f"{name} loss term should be a finite scalar, got {term.data!r}")
    alpha = weights.alpha
    total = terms[0] * alpha[0] + terms[1] * alpha[1] + terms[2] * alpha[2] + terms[3] * alpha[3]
    return LossBundle(*terms, l_total=total, c1=c1, c2=c2)
