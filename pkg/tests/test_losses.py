import math

import numpy as np
import pytest

from panofourier import LossWeights
from panofourier.autodiff import Tensor
from panofourier.losses import depth_loss, margin_loss, object_loss, reverse_huber, seg_loss, sobel, total_loss
from panofourier.utils.gradcheck import check_gradients


GRADCHECK_SHAPE = (1, 1, 4, 8)


def depth_map(seed: int, shape=(2, 1, 8, 16)) -> np.ndarray:
    return np.random.default_rng(seed).uniform(1.0, 5.0, size=shape)


def test_reverse_huber_values():
    assert reverse_huber(Tensor(np.zeros(3)), 0.5).item() == 0.0
    assert reverse_huber(Tensor(np.array([0.1, 1.0])), 0.2).item() == pytest.approx(1.35)
    assert reverse_huber(Tensor(np.array([-1.0, 1.0])), 0.2).item() == pytest.approx(2.6)


def test_reverse_huber_is_continuous_at_threshold():
    c = 0.7
    below = reverse_huber(Tensor(np.array([c])), c).item()
    above = reverse_huber(Tensor(np.array([c + 1e-9])), c).item()
    assert below == pytest.approx(c)
    assert above == pytest.approx(c, abs=1e-8)


def test_reverse_huber_mask_and_errors():
    errors = Tensor(np.array([0.1, 100.0]))
    assert reverse_huber(errors, 0.2, np.array([True, False])).item() == pytest.approx(0.1)
    with pytest.raises(ValueError, match="positive"):
        reverse_huber(errors, 0.0)
    with pytest.raises(ValueError, match="empty"):
        reverse_huber(errors, 0.2, np.array([False, False]))


def test_sobel_of_horizontal_ramp_wraps():
    ramp = np.tile(np.arange(8.0), (4, 1)).reshape(1, 1, 4, 8)
    gx, gy = sobel(Tensor(ramp))
    assert gx.data[0, 0, 1, 3] == pytest.approx(8.0)
    # columns 0 and 7 see the jump across the seam
    assert gx.data[0, 0, 1, 0] == pytest.approx(4 * (1.0 - 7.0))
    np.testing.assert_allclose(gy.data, 0.0)


def test_depth_loss_of_perfect_prediction_is_zero():
    gt = depth_map(0)
    loss, _, _ = depth_loss(Tensor(gt.copy()), gt)
    assert loss.item() == 0.0


@pytest.mark.parametrize("offset", [0.5, 1.0, 3.0])
def test_depth_loss_of_constant_offset(offset):
    gt = depth_map(1)
    loss, c1, _ = depth_loss(Tensor(gt + offset), gt)
    assert c1 == pytest.approx(0.2 * offset)
    assert loss.item() == pytest.approx(2.6 * offset)


def test_depth_loss_ignores_invalid_pixels():
    gt = depth_map(2)
    valid = np.ones(gt.shape, dtype=bool)
    valid[:, :, :, :4] = False
    pred = gt.copy()
    pred[:, :, :, :4] += 50.0
    loss, _, _ = depth_loss(Tensor(pred), gt, valid)
    assert loss.item() == 0.0


def test_depth_loss_rejects_bad_input():
    gt = depth_map(3)
    with pytest.raises(ValueError, match="without valid pixels"):
        depth_loss(Tensor(gt), gt, np.zeros(gt.shape, dtype=bool))
    with pytest.raises(ValueError, match="should both be"):
        depth_loss(Tensor(gt[:, :, :4]), gt)


@pytest.mark.parametrize("seed", range(20))
def test_depth_loss_gradients(seed):
    gt = depth_map(seed, GRADCHECK_SHAPE)
    pred = Tensor(gt + np.random.default_rng(seed + 100).normal(size=gt.shape), requires_grad=True)
    errors = check_gradients(lambda: depth_loss(pred, gt, c1=0.3, c2=0.5)[0], [pred])
    assert max(errors.values()) < 1e-4


def test_margin_loss_values():
    gt = np.linspace(1.0, 5.0, 16).reshape(1, 1, 4, 4)
    pred = np.linspace(1.0, 4.0, 16).reshape(1, 1, 4, 4)
    assert margin_loss(Tensor(gt), gt).item() == 0.0
    assert margin_loss(Tensor(pred), gt).item() == pytest.approx(0.5)
    assert margin_loss(Tensor(gt + 2.0), gt).item() == pytest.approx(4.0)


def test_margin_loss_per_image_averages_images():
    gt = np.stack([np.linspace(1.0, 5.0, 16), np.linspace(2.0, 3.0, 16)]).reshape(2, 1, 4, 4)
    pred = gt.copy()
    pred[0] -= 1.0
    assert margin_loss(Tensor(pred), gt, per_image=True).item() == pytest.approx(0.5)
    assert margin_loss(Tensor(pred), gt).item() == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(20))
def test_margin_loss_gradients(seed):
    gt = depth_map(seed, GRADCHECK_SHAPE)
    pred = Tensor(depth_map(seed + 50, GRADCHECK_SHAPE), requires_grad=True)
    for per_image in (False, True):
        errors = check_gradients(lambda: margin_loss(pred, gt, per_image=per_image), [pred])
        assert max(errors.values()) < 1e-4


def test_object_loss_values():
    gt = np.ones((1, 1, 2, 4))
    labels = np.array([[[0, 0, 1, 1], [0, 0, 1, 1]]])
    pred = gt.copy()
    pred[..., :2] += 1.0
    assert object_loss(Tensor(gt), gt, labels, 2).item() == 0.0
    assert object_loss(Tensor(pred), gt, labels, 2).item() == pytest.approx(0.5)
    only_zero = np.zeros_like(labels)
    assert object_loss(Tensor(pred), gt, only_zero, 2).item() == pytest.approx(0.5)
    ignored = np.full_like(labels, 255)
    assert object_loss(Tensor(pred), gt, ignored, 2).item() == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_object_loss_gradients(seed):
    rng = np.random.default_rng(seed)
    gt = depth_map(seed, GRADCHECK_SHAPE)
    labels = rng.integers(0, 7, size=(1, 4, 8))
    pred = Tensor(depth_map(seed + 10, GRADCHECK_SHAPE), requires_grad=True)
    errors = check_gradients(lambda: object_loss(pred, gt, labels, 7), [pred])
    assert max(errors.values()) < 1e-4


def test_seg_loss_uniform_logits():
    labels = np.array([[[0, 1], [1, 0]]])
    loss = seg_loss(Tensor(np.zeros((1, 2, 2, 2))), labels, np.ones(2))
    assert loss.item() == pytest.approx(math.log(2.0))


def test_seg_loss_confident_prediction_goes_to_zero():
    labels = np.array([[[0, 1], [1, 0]]])
    one_hot = np.stack([labels == 0, labels == 1], axis=1).astype(float)
    losses = [seg_loss(Tensor(margin * one_hot), labels, np.ones(2)).item() for margin in (1.0, 5.0, 20.0)]
    assert losses[0] > losses[1] > losses[2]
    assert losses[2] < 1e-8


def test_seg_loss_is_invariant_to_weight_scale():
    rng = np.random.default_rng(0)
    logits = Tensor(rng.normal(size=(2, 4, 4, 8)))
    labels = rng.integers(0, 4, size=(2, 4, 8))
    weights = rng.uniform(0.5, 2.0, size=4)
    assert seg_loss(logits, labels, weights).item() == pytest.approx(seg_loss(logits, labels, 2 * weights).item())


def test_total_loss_weighting():
    bundle = total_loss([1.0, 1.0, 1.0, 1.0])
    assert bundle.l_total.item() == pytest.approx(28.01)
    assert total_loss([0.0, 0.0, 0.0, 0.0]).l_total.item() == 0.0
    semantic = total_loss([0.3, 0.7, 0.2, 0.1], LossWeights(alpha=(1.0, 0.0, 0.0, 0.0)))
    assert semantic.l_total.item() == pytest.approx(0.3)


def test_total_loss_bundle_dict():
    values = total_loss([1.0, 2.0, 3.0, 4.0], c1=0.1, c2=0.2).as_dict()
    assert set(values) == {"l_seg", "l_dep", "l_mar", "l_obj", "l_total", "c1", "c2"}
    assert values["l_dep"] == 2.0
    assert "c1" not in total_loss([1.0, 2.0, 3.0, 4.0]).as_dict()


def test_total_loss_rejects_bad_components():
    with pytest.raises(ValueError, match="4 components"):
        total_loss([1.0, 1.0])
    with pytest.raises(ValueError, match="margin"):
        total_loss([1.0, 1.0, float("nan"), 1.0])


def test_loss_weights_for_mode():
    weights = LossWeights()
    depth = weights.for_mode("depth_only")
    assert depth.alpha == (0.0, 14.0, 0.0, 0.0)
    assert not depth.use_margin and not depth.use_object
    assert weights.for_mode("semantic_only").alpha == (9.0, 0.0, 0.0, 0.0)
    assert weights.for_mode("joint").to_dict() == weights.to_dict()
    with pytest.raises(ValueError):
        weights.for_mode("both")


def test_loss_weights_validation():
    with pytest.raises(TypeError):
        LossWeights(alpha=1.0)
    with pytest.raises(ValueError):
        LossWeights(alpha=(1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        LossWeights(alpha=(1.0, -2.0, 3.0, 4.0))
    with pytest.raises(TypeError):
        LossWeights(use_margin="yes")
