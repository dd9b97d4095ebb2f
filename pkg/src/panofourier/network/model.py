"""The joint segmentation and depth network."""

import logging
import typing
from collections import OrderedDict

import numpy as np

from ..autodiff.tensor import Tensor
from ..utils.data_classes import ModelConfig
from .blocks import DecoderBlock, EncoderBlock, FeatureExtractor
from .branches import DepthBranch, SemanticBranch
from .modules import ConvBNAct, Module, ModuleList

logger = logging.getLogger("general_logger")

ENCODER_BLOCKS = 4
DECODER_BLOCKS = 6


class PanoramaNet(Module):
    """Feature extractor, four Fourier encoder blocks, six Fourier decoder
    blocks and the semantic and depth branches.

    Scale plan for an input of height H: the extractor emits f1..f6 at
    H/2 .. H/64. f2 is lifted to the block width and the encoder blocks run
    at H/4, H/8, H/16 and H/32; each output is added to the extractor map one
    scale down. Decoder blocks output H/32 .. H/1, the four deepest taking the
    encoder skips. The semantic branch fuses the last five decoder outputs,
    the depth branch the last three.

    Args:
        config (ModelConfig): Network layout.
        seed (int, optional): Seed of the parameter initialization. Defaults to 0.
        spectral (bool, optional): Use spectral global operators in the Fourier
            blocks; False replaces them with 3x3 convolutions. Defaults to True.
    """

    def __init__(self, config: ModelConfig, seed: int = 0, spectral: bool = True):
        super().__init__()
        widths = config.extractor_widths
        for width in widths[2:]:
            if width != config.block_width:
                raise ValueError(
                    f"extractor widths at scales added to encoder outputs must equal the block width "
                    f"{config.block_width}, got {list(widths)}"
                )
        self.config = config
        rng = np.random.default_rng(seed)
        channels = config.block_width
        self.extractor = FeatureExtractor(rng, config)
        self.lift = ConvBNAct(widths[1], channels, 1, rng, config)
        self.encoder = ModuleList(EncoderBlock(channels, rng, config, spectral) for _ in range(ENCODER_BLOCKS))
        self.decoder = ModuleList(
            DecoderBlock(channels, rng, config, has_skip=i < ENCODER_BLOCKS, spectral=spectral)
            for i in range(DECODER_BLOCKS)
        )
        self.semantic = SemanticBranch(rng, config)
        self.depth = DepthBranch(rng, config)

    def check_input(self, panorama: Tensor):
        if panorama.ndim != 4 or panorama.shape[1] != 3:
            raise ValueError(f"panorama should be a (B, 3, H, W) tensor, got shape {panorama.shape}")
        height, width = panorama.shape[2:]
        if (height, width) != (self.config.height, self.config.width):
            raise ValueError(
                f"panorama extent {width}x{height} does not match the model extent "
                f"{self.config.width}x{self.config.height}"
            )

    def decode(self, panorama: Tensor) -> typing.List[Tensor]:
        """Runs extractor, encoder and decoder; returns the six decoder outputs."""
        self.check_input(panorama)
        maps = self.extractor(panorama)
        x = self.lift(maps[1])
        skips = []
        for block, lateral in zip(self.encoder, maps[2:]):
            x, skip = block(x, lateral)
            skips.append(skip)
        outputs = []
        for i, block in enumerate(self.decoder):
            skip = skips[ENCODER_BLOCKS - 1 - i] if i < ENCODER_BLOCKS else None
            x = block(x, skip)
            outputs.append(x)
        return outputs

    def forward(self, panorama: Tensor) -> typing.Tuple[Tensor, Tensor]:
        outputs = self.decode(panorama)
        logits = self.semantic(outputs[-self.config.semantic_fusion :])
        depth = self.depth(outputs[-self.config.depth_fusion :])
        return logits, depth

    def at_extent(self, height: int) -> "PanoramaNet":
        """Same weights, accepting panoramas of another valid extent."""
        ModelConfig.check_extent(height, 2 * height)
        self.config = self.config.with_extent(height)
        return self


class ModelState:
    """Named parameter and running-statistic values of a PanoramaNet.

    Args:
        config (ModelConfig): Layout the values belong to.
        values (typing.Mapping[str, np.ndarray]): Entry per parameter path.
    """

    def __init__(self, config: ModelConfig, values: typing.Mapping[str, np.ndarray]):
        self.config = config
        self.values = OrderedDict((name, np.asarray(value, dtype=np.float64)) for name, value in values.items())

    @classmethod
    def from_model(cls, model: PanoramaNet) -> "ModelState":
        return cls(model.config, model.state_dict())

    def build(self, seed: int = 0) -> PanoramaNet:
        model = PanoramaNet(self.config, seed=seed)
        model.load_state_dict(self.values)
        return model

    @property
    def skip_weights(self) -> typing.List[float]:
        return [float(self.values[f"decoder.{i}.skip_weight"]) for i in range(ENCODER_BLOCKS)]

    @property
    def semantic_fusion(self) -> np.ndarray:
        return self.values["semantic.fusion"]

    @property
    def depth_fusion(self) -> np.ndarray:
        return self.values["depth.fusion"]

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, ModelState) or list(self.values) != list(other.values):
            return False
        return all(np.array_equal(self.values[name], other.values[name]) for name in self.values)


def forward(panorama: Tensor, state: ModelState, mode: str = "eval") -> typing.Tuple[Tensor, Tensor]:
    """Builds the network described by ``state`` and runs one pass.

    ``mode`` is "train" (batch statistics) or "eval" (running statistics).
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"forward mode should be 'train' or 'eval', not {mode!r}")
    model = state.build()
    model.train(mode == "train")
    return model(panorama)
