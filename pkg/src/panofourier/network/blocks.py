"""Feature extractor, W-convolutions and the encoder/decoder blocks."""

import typing

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor
from ..utils.data_classes import ModelConfig
from .fourier_block import FourierBlock
from .modules import BatchNorm2d, Conv2d, ConvBNAct, Module, ModuleList, Parameter, PReLU


class WConv(Module):
    """Bottleneck residual: 1x1 reduction to C/4, 3x3, 1x1 back to C.

    out = x + act(bn(conv_expand(...))), so a zero gain on the last batch
    normalization makes the block an identity.
    """

    def __init__(self, channels: int, rng: np.random.Generator, config: ModelConfig):
        super().__init__()
        if channels % 4:
            raise ValueError(f"W-conv needs a channel count divisible by 4, not {channels}")
        inner = channels // 4
        self.channels = channels
        self.reduce = ConvBNAct(channels, inner, 1, rng, config)
        self.spatial = ConvBNAct(inner, inner, 3, rng, config)
        self.expand = ConvBNAct(inner, channels, 1, rng, config)
        if config.zero_init_residual:
            self.expand.bn.gamma.data[...] = 0.0

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != self.channels:
            raise ValueError(f"W-conv expects {self.channels} channels, got input of shape {x.shape}")
        return x + self.expand(self.spatial(self.reduce(x)))


class ResidualUnit(Module):
    def __init__(self, channels: int, rng: np.random.Generator, config: ModelConfig):
        super().__init__()
        mode = config.padding_mode
        self.conv1 = Conv2d(channels, channels, 3, rng, bias=False, padding_mode=mode)
        self.bn1 = BatchNorm2d(channels, config.bn_momentum, config.bn_eps)
        self.act1 = PReLU(channels, config.prelu_init)
        self.conv2 = Conv2d(channels, channels, 3, rng, bias=False, padding_mode=mode)
        self.bn2 = BatchNorm2d(channels, config.bn_momentum, config.bn_eps)
        self.act2 = PReLU(channels, config.prelu_init)

    def forward(self, x: Tensor) -> Tensor:
        return self.act2(x + self.bn2(self.conv2(self.act1(self.bn1(self.conv1(x))))))


class FeatureExtractor(Module):
    """Residual backbone producing six maps at 1/2 ... 1/64 of the input extent."""

    def __init__(self, rng: np.random.Generator, config: ModelConfig):
        super().__init__()
        widths = config.extractor_widths
        self.stem = ConvBNAct(3, widths[0], 3, rng, config, stride=2)
        self.stem_unit = ResidualUnit(widths[0], rng, config)
        self.downs = ModuleList(ConvBNAct(widths[i - 1], widths[i], 3, rng, config, stride=2) for i in range(1, 6))
        self.units = ModuleList(ResidualUnit(widths[i], rng, config) for i in range(1, 6))

    def forward(self, x: Tensor) -> typing.List[Tensor]:
        if x.ndim != 4 or x.shape[1] != 3:
            raise ValueError(f"feature extractor expects a (B, 3, H, W) panorama, got shape {x.shape}")
        height, width = x.shape[2:]
        if height % 64 or width % 64:
            raise ValueError(f"panorama extent {width}x{height} is not divisible by 64")
        maps = [self.stem_unit(self.stem(x))]
        for down, unit in zip(self.downs, self.units):
            maps.append(unit(down(maps[-1])))
        return maps


class EncoderBlock(Module):
    """skip = FB(x); out = W-conv(downscale(skip)) (+ extractor map at the new scale)."""

    def __init__(self, channels: int, rng: np.random.Generator, config: ModelConfig, spectral: bool = True):
        super().__init__()
        self.fourier = FourierBlock(channels, rng, config, spectral=spectral)
        self.wconv = WConv(channels, rng, config)

    def forward(self, x: Tensor, lateral: typing.Optional[Tensor] = None) -> typing.Tuple[Tensor, Tensor]:
        skip = self.fourier(x)
        out = self.wconv(F.downscale(skip))
        if lateral is not None:
            if lateral.shape != out.shape:
                raise ValueError(f"extractor map of shape {lateral.shape} does not match encoder output {out.shape}")
            out = out + lateral
        return out, skip


class DecoderBlock(Module):
    """y = upscale(W-conv(x)) (+ w_skip * skip); out = FB(y)."""

    def __init__(
        self,
        channels: int,
        rng: np.random.Generator,
        config: ModelConfig,
        has_skip: bool,
        spectral: bool = True,
    ):
        super().__init__()
        self.has_skip = has_skip
        self.padding_mode = config.padding_mode
        self.wconv = WConv(channels, rng, config)
        self.fourier = FourierBlock(channels, rng, config, spectral=spectral)
        self.skip_weight = Parameter(np.asarray(config.skip_init)) if has_skip else None

    def forward(self, x: Tensor, skip: typing.Optional[Tensor] = None) -> Tensor:
        if (skip is not None) != self.has_skip:
            state = "expects" if self.has_skip else "does not take"
            raise ValueError(f"this decoder block {state} a skip connection")
        y = F.upscale(self.wconv(x), self.padding_mode)
        if skip is not None:
            if skip.shape != y.shape:
                raise ValueError(f"skip of shape {skip.shape} does not match upscaled features {y.shape}")
            y = y + self.skip_weight * skip
        return self.fourier(y)
