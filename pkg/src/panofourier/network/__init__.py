from .blocks import DecoderBlock, EncoderBlock, FeatureExtractor, WConv
from .branches import DepthBranch, SemanticBranch
from .checkpoint import load_state, read_checkpoint, save_state, write_checkpoint
from .fourier_block import FourierBlock, SpectralTransform
from .model import ModelState, PanoramaNet, forward
from .modules import BatchNorm2d, Conv2d, Module, ModuleList, Parameter, PReLU
from .optimizer import Adam, LearningRateSchedule
