"""Fourier convolution blocks: a local 3x3 path plus a global spectral path."""

import numpy as np

from ..autodiff.fft import irfft2, rfft2
from ..autodiff.tensor import Tensor, concat, split
from ..utils.data_classes import ModelConfig
from .modules import BatchNorm2d, Conv2d, Module, PReLU


class SpectralTransform(Module):
    """Global operator: 1x1 reduction, pointwise mixing of the real 2-D
    spectrum, inverse transform and 1x1 restoration.

    Every output pixel depends on every input pixel.
    """

    def __init__(self, channels: int, rng: np.random.Generator, config: ModelConfig):
        super().__init__()
        hidden = max(1, int(round(channels * config.spectral_ratio)))
        self.hidden = hidden
        self.conv_in = Conv2d(channels, hidden, 1, rng, bias=False)
        self.bn_in = BatchNorm2d(hidden, config.bn_momentum, config.bn_eps)
        self.act_in = PReLU(hidden, config.prelu_init)
        self.conv_freq = Conv2d(2 * hidden, 2 * hidden, 1, rng, bias=False)
        self.bn_freq = BatchNorm2d(2 * hidden, config.bn_momentum, config.bn_eps)
        self.act_freq = PReLU(2 * hidden, config.prelu_init)
        self.conv_out = Conv2d(hidden, channels, 1, rng, bias=False)

    def forward(self, x: Tensor) -> Tensor:
        width = x.shape[3]
        reduced = self.act_in(self.bn_in(self.conv_in(x)))
        real, imag = rfft2(reduced)
        spectrum = concat([real, imag], axis=1)
        spectrum = self.act_freq(self.bn_freq(self.conv_freq(spectrum)))
        real, imag = split(spectrum, [self.hidden, self.hidden], axis=1)
        return self.conv_out(irfft2(real, imag, width=width))


class FourierBlock(Module):
    """Splits the channels into a local and a global part.

    y_local = act(bn(conv_l2l(x_local) + conv_g2l(x_global)))
    y_global = act(bn(conv_l2g(x_local) + spectral(x_global)))

    With ``spectral=False`` the global operator is a plain 3x3 convolution,
    which limits the receptive field to the 3x3 neighbourhood.
    """

    def __init__(
        self,
        channels: int,
        rng: np.random.Generator,
        config: ModelConfig,
        spectral: bool = True,
    ):
        super().__init__()
        global_channels = int(round(channels * config.global_ratio))
        if not 0 < global_channels < channels:
            raise ValueError(f"cannot split {channels} channels with a global ratio of {config.global_ratio}")
        local_channels = channels - global_channels
        self.channels = channels
        self.local_channels = local_channels
        self.global_channels = global_channels
        mode = config.padding_mode
        self.conv_l2l = Conv2d(local_channels, local_channels, 3, rng, bias=False, padding_mode=mode)
        self.conv_g2l = Conv2d(global_channels, local_channels, 3, rng, bias=False, padding_mode=mode)
        self.conv_l2g = Conv2d(local_channels, global_channels, 3, rng, bias=False, padding_mode=mode)
        if spectral:
            self.global_op = SpectralTransform(global_channels, rng, config)
        else:
            self.global_op = Conv2d(global_channels, global_channels, 3, rng, bias=False, padding_mode=mode)
        self.bn_local = BatchNorm2d(local_channels, config.bn_momentum, config.bn_eps)
        self.act_local = PReLU(local_channels, config.prelu_init)
        self.bn_global = BatchNorm2d(global_channels, config.bn_momentum, config.bn_eps)
        self.act_global = PReLU(global_channels, config.prelu_init)

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != self.channels:
            raise ValueError(f"Fourier block expects {self.channels} channels, got input of shape {x.shape}")
        x_local, x_global = split(x, [self.local_channels, self.global_channels], axis=1)
        y_local = self.act_local(self.bn_local(self.conv_l2l(x_local) + self.conv_g2l(x_global)))
        y_global = self.act_global(self.bn_global(self.conv_l2g(x_local) + self.global_op(x_global)))
        return concat([y_local, y_global], axis=1)

