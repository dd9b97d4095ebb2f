"""Differentiable network operations on (batch, channel, height, width) tensors."""

import functools
import typing

import numpy as np

from .tensor import Tensor, make_output

# numpy.pad modes for (vertical, horizontal)
_PAD_MODES = {
    "circular_h_replicate_v": ("edge", "wrap"),
    "circular": ("wrap", "wrap"),
}


def _axis_modes(padding_mode: str) -> typing.Tuple[str, str]:
    if padding_mode not in _PAD_MODES:
        raise ValueError(f"padding mode should be one of {tuple(_PAD_MODES)}, not {padding_mode!r}")
    return _PAD_MODES[padding_mode]


def _pad_index(n: int, pad: int, mode: str) -> np.ndarray:
    return np.pad(np.arange(n), pad, mode=mode)


def pad_array(x: np.ndarray, pad_h: int, pad_w: int, padding_mode: str) -> np.ndarray:
    """Pads the last two axes of ``x``."""
    mode_h, mode_w = _axis_modes(padding_mode)
    if pad_h:
        x = np.take(x, _pad_index(x.shape[-2], pad_h, mode_h), axis=-2)
    if pad_w:
        x = np.take(x, _pad_index(x.shape[-1], pad_w, mode_w), axis=-1)
    return x


def _fold_axis(g: np.ndarray, n: int, pad: int, mode: str, axis: int) -> np.ndarray:
    if not pad:
        return g
    index = _pad_index(n, pad, mode)
    out = np.take(g, np.arange(pad, pad + n), axis=axis)
    border = list(range(pad)) + list(range(pad + n, n + 2 * pad))
    for k in border:
        target = [slice(None)] * g.ndim
        target[axis] = index[k]
        source = [slice(None)] * g.ndim
        source[axis] = k
        out[tuple(target)] += g[tuple(source)]
    return out


def unpad_adjoint(g: np.ndarray, height: int, width: int, pad_h: int, pad_w: int, padding_mode: str) -> np.ndarray:
    """Adjoint of ``pad_array``: folds padded gradients back onto their sources."""
    mode_h, mode_w = _axis_modes(padding_mode)
    g = _fold_axis(g, width, pad_w, mode_w, g.ndim - 1)
    return _fold_axis(g, height, pad_h, mode_h, g.ndim - 2)


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: typing.Optional[Tensor] = None,
    stride: int = 1,
    padding_mode: str = "circular_h_replicate_v",
) -> Tensor:
    """2-D convolution with circular horizontal padding.

    The kernel is applied at every ``stride`` pixels so the output extent is
    exactly (H / stride, W / stride).
    """
    if x.ndim != 4:
        raise ValueError(f"conv2d expects a (B, C, H, W) input, got shape {x.shape}")
    if weight.ndim != 4:
        raise ValueError(f"conv2d expects a (C_out, C_in, kh, kw) kernel, got shape {weight.shape}")
    batch, channels, height, width = x.shape
    out_channels, in_channels, kh, kw = weight.shape
    if in_channels != channels:
        raise ValueError(f"conv2d: input has {channels} channels but weight expects {in_channels}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError(f"conv2d kernel extents must be odd, got {kh}x{kw}")
    if stride < 1 or height % stride or width % stride:
        raise ValueError(f"input extent {height}x{width} is not divisible by stride {stride}")
    if bias is not None and bias.shape != (out_channels,):
        raise ValueError(f"conv2d bias should have shape ({out_channels},), got {bias.shape}")

    pad_h, pad_w = kh // 2, kw // 2
    padded = pad_array(x.data, pad_h, pad_w, padding_mode)
    out_h, out_w = height // stride, width // stride
    kernel = weight.data

    def window(i, j):
        return padded[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride]

    out = np.zeros((out_channels, batch, out_h, out_w))
    for i in range(kh):
        for j in range(kw):
            out += np.tensordot(kernel[:, :, i, j], window(i, j), axes=([1], [1]))
    out = out.transpose(1, 0, 2, 3)
    if bias is not None:
        out = out + bias.data.reshape(1, -1, 1, 1)

    def backward_fn(g):
        grad_padded = np.zeros_like(padded)
        grad_kernel = np.zeros_like(kernel)
        for i in range(kh):
            for j in range(kw):
                grad_kernel[:, :, i, j] = np.tensordot(g, window(i, j), axes=([0, 2, 3], [0, 2, 3]))
                contribution = np.tensordot(g, kernel[:, :, i, j], axes=([1], [0])).transpose(0, 3, 1, 2)
                grad_padded[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride] += contribution
        grad_x = unpad_adjoint(grad_padded, height, width, pad_h, pad_w, padding_mode)
        grad_bias = g.sum(axis=(0, 2, 3)) if bias is not None else None
        return grad_x, grad_kernel, grad_bias

    return make_output(out, (x, weight, bias), backward_fn, "conv2d")


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = 0.1,
    eps: float = 1e-5,
) -> Tensor:
    """Per-channel normalization over (batch, height, width).

    In training the batch statistics are used and the running buffers are
    updated in place with the unbiased variance. In evaluation the running
    buffers are used.
    """
    if eps <= 0:
        raise ValueError(f"batch norm eps must be positive, not {eps}")
    if x.ndim != 4:
        raise ValueError(f"batch norm expects a (B, C, H, W) input, got shape {x.shape}")
    channels = x.shape[1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise ValueError(f"batch norm parameters should have shape ({channels},)")
    count = x.shape[0] * x.shape[2] * x.shape[3]
    if count < 1:
        raise ValueError("batch norm over an empty input")

    data = x.data
    g_shape = (1, channels, 1, 1)
    if training:
        mean = data.mean(axis=(0, 2, 3))
        var = data.var(axis=(0, 2, 3))
        unbiased = var * count / (count - 1) if count > 1 else var
        running_mean *= 1.0 - momentum
        running_mean += momentum * mean
        running_var *= 1.0 - momentum
        running_var += momentum * unbiased
    else:
        mean, var = running_mean.copy(), running_var.copy()

    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = (data - mean.reshape(g_shape)) * inv_std.reshape(g_shape)
    out = x_hat * gamma.data.reshape(g_shape) + beta.data.reshape(g_shape)

    def backward_fn(g):
        grad_gamma = (g * x_hat).sum(axis=(0, 2, 3))
        grad_beta = g.sum(axis=(0, 2, 3))
        d_hat = g * gamma.data.reshape(g_shape)
        if training:
            grad_x = (
                inv_std.reshape(g_shape)
                / count
                * (
                    count * d_hat
                    - d_hat.sum(axis=(0, 2, 3), keepdims=True)
                    - x_hat * (d_hat * x_hat).sum(axis=(0, 2, 3), keepdims=True)
                )
            )
        else:
            grad_x = d_hat * inv_std.reshape(g_shape)
        return grad_x, grad_gamma, grad_beta

    return make_output(out, (x, gamma, beta), backward_fn, "batch_norm")


def _channel_shape(x: Tensor, slope: Tensor) -> tuple:
    if slope.size == 1:
        return (1,) * x.ndim
    if x.ndim < 2 or slope.shape != (x.shape[1],):
        raise ValueError(f"PReLU slope of shape {slope.shape} does not match input {x.shape}")
    return (1, x.shape[1]) + (1,) * (x.ndim - 2)


def prelu(x: Tensor, slope: Tensor) -> Tensor:
    """max(0, x) + slope * min(0, x) with one slope per channel."""
    shape = _channel_shape(x, slope)
    data = x.data
    a = slope.data.reshape(shape)
    positive = data > 0
    out = np.where(positive, data, a * data)

    def backward_fn(g):
        grad_x = np.where(positive, g, a * g)
        negative_part = np.where(positive, 0.0, g * data)
        if slope.size == 1:
            grad_slope = np.asarray(negative_part.sum()).reshape(slope.shape)
        else:
            axes = tuple(i for i in range(data.ndim) if i != 1)
            grad_slope = negative_part.sum(axis=axes)
        return grad_x, grad_slope

    return make_output(out, (x, slope), backward_fn, "prelu")


def relu(x: Tensor) -> Tensor:
    positive = x.data > 0
    return make_output(np.where(positive, x.data, 0.0), (x,), lambda g: (np.where(positive, g, 0.0),), "relu")


@functools.lru_cache(maxsize=64)
def upsample_matrix(n: int, wrap: bool) -> np.ndarray:
    """(2n, n) bilinear x2 interpolation matrix with half-pixel centers."""
    matrix = np.zeros((2 * n, n))
    for i in range(n):
        before = (i - 1) % n if wrap else max(i - 1, 0)
        after = (i + 1) % n if wrap else min(i + 1, n - 1)
        matrix[2 * i, i] += 0.75
        matrix[2 * i, before] += 0.25
        matrix[2 * i + 1, i] += 0.75
        matrix[2 * i + 1, after] += 0.25
    matrix.flags.writeable = False
    return matrix


def upscale(x: Tensor, padding_mode: str = "circular_h_replicate_v") -> Tensor:
    """Bilinear x2 upscaling; horizontal neighbours wrap around."""
    mode_h, _ = _axis_modes(padding_mode)
    rows = upsample_matrix(x.shape[2], mode_h == "wrap")
    cols = upsample_matrix(x.shape[3], True)
    out = np.einsum("ph,bchw,qw->bcpq", rows, x.data, cols, optimize=True)

    def backward_fn(g):
        return (np.einsum("ph,bcpq,qw->bchw", rows, g, cols, optimize=True),)

    return make_output(out, (x,), backward_fn, "upscale")


def downscale(x: Tensor) -> Tensor:
    """2x2 average pooling."""
    batch, channels, height, width = x.shape
    if height % 2 or width % 2:
        raise ValueError(f"cannot halve an extent of {height}x{width}")
    out = x.data.reshape(batch, channels, height // 2, 2, width // 2, 2).mean(axis=(3, 5))

    def backward_fn(g):
        return (np.repeat(np.repeat(g, 2, axis=2), 2, axis=3) * 0.25,)

    return make_output(out, (x,), backward_fn, "downscale")


def resample(x: Tensor, factor: float, padding_mode: str = "circular_h_replicate_v") -> Tensor:
    """Rescales both spatial axes by 2 or 0.5."""
    if factor == 2:
        return upscale(x, padding_mode)
    if factor == 0.5:
        return downscale(x)
    raise ValueError(f"resample factor must be 2 or 0.5, not {factor}")


def weighted_cross_entropy(
    logits: Tensor, labels: np.ndarray, class_weights: np.ndarray, ignore_index: int = 255
) -> Tensor:
    """Class-weighted softmax cross-entropy averaged over the summed weights.

    Pixels labelled ``ignore_index`` or outside [0, C) do not contribute.
    """
    if logits.ndim != 4:
        raise ValueError(f"logits should be (B, C, H, W), got shape {logits.shape}")
    batch, classes, height, width = logits.shape
    labels = np.asarray(labels)
    if labels.shape != (batch, height, width):
        raise ValueError(f"labels of shape {labels.shape} do not match logits {logits.shape}")
    class_weights = np.asarray(class_weights, dtype=np.float64)
    if class_weights.shape != (classes,):
        raise ValueError(f"class weights should have shape ({classes},), got {class_weights.shape}")

    valid = (labels != ignore_index) & (labels >= 0) & (labels < classes)
    safe_labels = np.where(valid, labels, 0).astype(np.intp)
    pixel_weights = np.where(valid, class_weights[safe_labels], 0.0)
    total = pixel_weights.sum()
    if total <= 0:
        raise ValueError("no labelled pixel contributes to the cross-entropy")

    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    picked = np.take_along_axis(log_probs, safe_labels[:, None], axis=1)[:, 0]
    loss = -(pixel_weights * picked).sum() / total

    def backward_fn(g):
        grad = np.exp(log_probs)
        np.put_along_axis(grad, safe_labels[:, None], np.take_along_axis(grad, safe_labels[:, None], axis=1) - 1.0, axis=1)
        return (grad * (pixel_weights / total)[:, None] * g,)

    return make_output(np.asarray(loss), (logits,), backward_fn, "weighted_cross_entropy")
