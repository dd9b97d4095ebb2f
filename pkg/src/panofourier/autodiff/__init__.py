from .fft import fft, fft2, irfft2, rfft2
from .functional import (
    batch_norm,
    conv2d,
    downscale,
    prelu,
    relu,
    resample,
    upscale,
    weighted_cross_entropy,
)
from .tensor import Graph, Tensor, backward, concat, no_grad, split
