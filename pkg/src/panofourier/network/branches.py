"""Output heads fusing several decoder scales with learned scalar weights."""

import typing

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor, take
from ..utils.data_classes import ModelConfig
from .modules import Conv2d, Module, ModuleList, Parameter, PReLU


class _FusionBranch(Module):
    """conv 3x3 per input scale, upscale to full extent, learned weighted sum,
    then a 3x3 refinement and a 1x1 projection."""

    def __init__(
        self,
        in_channels: int,
        count: int,
        out_channels: int,
        rng: np.random.Generator,
        config: ModelConfig,
        use_prelu: bool,
    ):
        super().__init__()
        width = config.branch_width
        mode = config.padding_mode
        self.count = count
        self.padding_mode = mode
        self.use_prelu = use_prelu
        self.feature_convs = ModuleList(Conv2d(in_channels, width, 3, rng, padding_mode=mode) for _ in range(count))
        self.feature_acts = ModuleList(PReLU(width, config.prelu_init) for _ in range(count)) if use_prelu else None
        self.fusion = Parameter(np.full(count, 1.0 / count))
        self.refine = Conv2d(width, width, 3, rng, padding_mode=mode)
        self.refine_act = PReLU(width, config.prelu_init) if use_prelu else None
        self.project = Conv2d(width, out_channels, 1, rng)

    def _activate(self, x: Tensor, act: typing.Optional[Module]) -> Tensor:
        return act(x) if act is not None else F.relu(x)

    def forward(self, features: typing.Sequence[Tensor]) -> Tensor:
        if len(features) != self.count:
            raise ValueError(f"branch expects {self.count} feature maps, got {len(features)}")
        target_height = features[-1].shape[2]
        fused = None
        for i, feature in enumerate(features):
            act = self.feature_acts[i] if self.feature_acts is not None else None
            y = self._activate(self.feature_convs[i](feature), act)
            while y.shape[2] < target_height:
                y = F.upscale(y, self.padding_mode)
            if y.shape[2] != target_height:
                raise ValueError(f"feature map of height {feature.shape[2]} cannot be brought to {target_height}")
            term = take(self.fusion, i) * y
            fused = term if fused is None else fused + term
        return self.project(self._activate(self.refine(fused), self.refine_act))


class SemanticBranch(_FusionBranch):
    """Per-class logits at full extent; ReLU activations."""

    def __init__(self, rng: np.random.Generator, config: ModelConfig):
        super().__init__(config.block_width, config.semantic_fusion, config.num_classes, rng, config, use_prelu=False)


class DepthBranch(_FusionBranch):
    """Non-negative depth at full extent; PReLU inside and a ReLU output."""

    def __init__(self, rng: np.random.Generator, config: ModelConfig):
        super().__init__(config.block_width, config.depth_fusion, 1, rng, config, use_prelu=True)

    def forward(self, features: typing.Sequence[Tensor]) -> Tensor:
        return F.relu(super().forward(features))
