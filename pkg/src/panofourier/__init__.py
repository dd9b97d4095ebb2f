from importlib.metadata import version

from .utils.log_utils import setup_logger

setup_logger("general_logger", "panofourier_general_log.log")
setup_logger("training_logger", "panofourier_training_log.log")

from .core import JointTrainer
from .data import Sample, SceneSpec, generate_samples, render_scene
from .metrics import MetricsReport
from .network import ModelState, PanoramaNet, load_state, save_state
from .utils.data_classes import LossWeights, ModelConfig, OptimizerSettings, Settings

__version__ = version("panofourier")

__all__ = [
    "__version__",
    "JointTrainer",
    "LossWeights",
    "MetricsReport",
    "ModelConfig",
    "ModelState",
    "OptimizerSettings",
    "PanoramaNet",
    "Sample",
    "SceneSpec",
    "Settings",
    "generate_samples",
    "load_state",
    "render_scene",
    "save_state",
]
