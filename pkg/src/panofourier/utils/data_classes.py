import typing
from numbers import Real

TRAINING_MODES = ("joint", "depth_only", "semantic_only")
LOG_BASES = ("natural", "10")
PADDING_MODES = ("circular_h_replicate_v", "circular")


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


class ModelConfig:
    """A class for containing the network layout

    Args:
        height (int, optional): Panorama height H in pixels. Must be a
            power of two and a multiple of 64 (the total downsampling of
            the feature extractor). Defaults to 64.
        width (int, optional): Panorama width W, always 2 * height.
            Defaults to 128.
        num_classes (int, optional): Number of semantic classes C,
            including the unknown class. Defaults to 7.
        extractor_widths (typing.Sequence[int], optional): Channel widths of
            the six feature-extractor maps f1..f6 (scales /2 to /64).
            Defaults to (16, 32, 64, 64, 64, 64).
        block_width (int, optional): Channel width of every encoder and
            decoder block. Defaults to 64.
        branch_width (int, optional): Channel width inside the semantic and
            depth branches. Defaults to 32.
        global_ratio (Real, optional): Share of block channels routed
            through the global (spectral) path of a Fourier block.
            Defaults to 0.5.
        spectral_ratio (Real, optional): Hidden width of the spectral
            transform relative to its global channels. Defaults to 0.5.
        prelu_init (Real, optional): Initial PReLU slope. Defaults to 0.25.
        skip_init (Real, optional): Initial value of the learnable skip
            weights. Defaults to 1.0.
        semantic_fusion (int, optional): Number of decoder outputs fused by
            the semantic branch. Defaults to 5.
        depth_fusion (int, optional): Number of decoder outputs fused by the
            depth branch. Defaults to 3.
        bn_momentum (Real, optional): Running-statistics momentum of batch
            normalization. Defaults to 0.1.
        bn_eps (Real, optional): Batch-normalization epsilon. Defaults to 1e-5.
        circular_vertical (bool, optional): Wrap the vertical axis too
            (torus topology) instead of replicating the top and bottom rows.
            Only meant for equivariance checks. Defaults to False.
        zero_init_residual (bool, optional): Initialize the gain of the last
            batch normalization of every W-conv to zero so the block starts
            as an identity. Defaults to False.
    """

    def __init__(
        self,
        height: int = 64,
        width: int = 128,
        num_classes: int = 7,
        extractor_widths: typing.Sequence[int] = (16, 32, 64, 64, 64, 64),
        block_width: int = 64,
        branch_width: int = 32,
        global_ratio: Real = 0.5,
        spectral_ratio: Real = 0.5,
        prelu_init: Real = 0.25,
        skip_init: Real = 1.0,
        semantic_fusion: int = 5,
        depth_fusion: int = 3,
        bn_momentum: Real = 0.1,
        bn_eps: Real = 1e-5,
        circular_vertical: bool = False,
        zero_init_residual: bool = False,
    ):

        self.height = height
        self.width = width
        self.num_classes = num_classes
        self.extractor_widths = extractor_widths
        self.block_width = block_width
        self.branch_width = branch_width
        self.global_ratio = global_ratio
        self.spectral_ratio = spectral_ratio
        self.prelu_init = prelu_init
        self.skip_init = skip_init
        self.semantic_fusion = semantic_fusion
        self.depth_fusion = depth_fusion
        self.bn_momentum = bn_momentum
        self.bn_eps = bn_eps
        self.circular_vertical = circular_vertical
        self.zero_init_residual = zero_init_residual
        self.check_extent(self.height, self.width)

    @staticmethod
    def check_extent(height: int, width: int):
        """Raises ValueError unless (height, width) is a valid panorama extent."""
        if width != 2 * height:
            raise ValueError(f"panorama width must be twice the height, got {width}x{height}")
        if height < 64 or height & (height - 1) or height % 64:
            raise ValueError(f"panorama height must be a power of two and a multiple of 64, not {height}")

    @property
    def padding_mode(self) -> str:
        return "circular" if self.circular_vertical else "circular_h_replicate_v"

    @property
    def height(self):
        return self._height

    @height.setter
    def height(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.height should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.ModelConfig.height should be above 0, not {value}")
        self._height = value

    @property
    def width(self):
        return self._width

    @width.setter
    def width(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.width should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.ModelConfig.width should be above 0, not {value}")
        self._width = value

    @property
    def num_classes(self):
        return self._num_classes

    @num_classes.setter
    def num_classes(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.num_classes should be an int, not a {type(value)}")
        if value < 2 or value > 255:
            raise ValueError(f"panofourier.ModelConfig.num_classes should be between 2 and 255, not {value}")
        self._num_classes = value

    @property
    def extractor_widths(self):
        return self._extractor_widths

    @extractor_widths.setter
    def extractor_widths(self, value: typing.Sequence[int]):
        if not isinstance(value, (list, tuple)):
            raise TypeError(f"panofourier.ModelConfig.extractor_widths should be a list or tuple, not a {type(value)}")
        if len(value) != 6:
            raise ValueError(f"panofourier.ModelConfig.extractor_widths should have 6 entries, not {len(value)}")
        for entry in value:
            if not _is_int(entry) or entry <= 0:
                raise ValueError(f"panofourier.ModelConfig.extractor_widths should contain positive ints, not {entry}")
        self._extractor_widths = tuple(value)

    @property
    def block_width(self):
        return self._block_width

    @block_width.setter
    def block_width(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.block_width should be an int, not a {type(value)}")
        if value < 4 or value % 4:
            raise ValueError(f"panofourier.ModelConfig.block_width should be a positive multiple of 4, not {value}")
        self._block_width = value

    @property
    def branch_width(self):
        return self._branch_width

    @branch_width.setter
    def branch_width(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.branch_width should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.ModelConfig.branch_width should be above 0, not {value}")
        self._branch_width = value

    @property
    def global_ratio(self):
        return self._global_ratio

    @global_ratio.setter
    def global_ratio(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.ModelConfig.global_ratio should be a Real, not a {type(value)}")
        if not 0 < value < 1:
            raise ValueError(f"panofourier.ModelConfig.global_ratio should be strictly between 0 and 1, not {value}")
        self._global_ratio = value

    @property
    def spectral_ratio(self):
        return self._spectral_ratio

    @spectral_ratio.setter
    def spectral_ratio(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.ModelConfig.spectral_ratio should be a Real, not a {type(value)}")
        if not 0 < value <= 1:
            raise ValueError(f"panofourier.ModelConfig.spectral_ratio should be in (0, 1], not {value}")
        self._spectral_ratio = value

    @property
    def prelu_init(self):
        return self._prelu_init

    @prelu_init.setter
    def prelu_init(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.ModelConfig.prelu_init should be a Real, not a {type(value)}")
        self._prelu_init = float(value)

    @property
    def skip_init(self):
        return self._skip_init

    @skip_init.setter
    def skip_init(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.ModelConfig.skip_init should be a Real, not a {type(value)}")
        self._skip_init = float(value)

    @property
    def semantic_fusion(self):
        return self._semantic_fusion

    @semantic_fusion.setter
    def semantic_fusion(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.semantic_fusion should be an int, not a {type(value)}")
        if not 1 <= value <= 6:
            raise ValueError(f"panofourier.ModelConfig.semantic_fusion should be between 1 and 6, not {value}")
        self._semantic_fusion = value

    @property
    def depth_fusion(self):
        return self._depth_fusion

    @depth_fusion.setter
    def depth_fusion(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.ModelConfig.depth_fusion should be an int, not a {type(value)}")
        if not 1 <= value <= 6:
            raise ValueError(f"panofourier.ModelConfig.depth_fusion should be between 1 and 6, not {value}")
        self._depth_fusion = value

    @property
    def bn_momentum(self):
        return self._bn_momentum

    @bn_momentum.setter
    def bn_momentum(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.ModelConfig.bn_momentum should be a Real, not a {type(value)}")
        if not 0 <= value <= 1:
            raise ValueError(f"panofourier.ModelConfig.bn_momentum should be between 0 and 1, not {value}")
        self._bn_momentum = float(value)

    @property
    def bn_eps(self):
        return self._bn_eps

    @bn_eps.setter
    def bn_eps(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.ModelConfig.bn_eps should be a Real, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.ModelConfig.bn_eps should be above 0, not {value}")
        self._bn_eps = float(value)

    @property
    def circular_vertical(self):
        return self._circular_vertical

    @circular_vertical.setter
    def circular_vertical(self, value: bool):
        if not isinstance(value, bool):
            raise TypeError(f"panofourier.ModelConfig.circular_vertical should be a bool, not a {type(value)}")
        self._circular_vertical = value

    @property
    def zero_init_residual(self):
        return self._zero_init_residual

    @zero_init_residual.setter
    def zero_init_residual(self, value: bool):
        if not isinstance(value, bool):
            raise TypeError(f"panofourier.ModelConfig.zero_init_residual should be a bool, not a {type(value)}")
        self._zero_init_residual = value

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "width": self.width,
            "num_classes": self.num_classes,
            "extractor_widths": list(self.extractor_widths),
            "block_width": self.block_width,
            "branch_width": self.branch_width,
            "global_ratio": self.global_ratio,
            "spectral_ratio": self.spectral_ratio,
            "prelu_init": self.prelu_init,
            "skip_init": self.skip_init,
            "semantic_fusion": self.semantic_fusion,
            "depth_fusion": self.depth_fusion,
            "bn_momentum": self.bn_momentum,
            "bn_eps": self.bn_eps,
            "circular_vertical": self.circular_vertical,
            "zero_init_residual": self.zero_init_residual,
        }

    def with_extent(self, height: int) -> "ModelConfig":
        """Returns a copy of this config at another panorama extent."""
        values = self.to_dict()
        values["height"] = height
        values["width"] = 2 * height
        return ModelConfig(**values)


class LossWeights:
    """A class for containing the weights of the joint training loss

    Args:
        alpha (typing.Sequence[Real], optional): Weights of the semantic,
            depth, margin and object terms in that order.
            Defaults to (9.0, 14.0, 0.01, 5.0).
        use_margin (bool, optional): Include the margin term. Defaults to True.
        use_object (bool, optional): Include the object term. Defaults to True.
        margin_per_image (bool, optional): Take the depth extrema of the
            margin term per image and average, instead of over the whole
            batch. Defaults to False.
        relative_threshold (Real, optional): Fraction of the largest masked
            error used as the reverse-Huber threshold. Defaults to 0.2.
    """

    def __init__(
        self,
        alpha: typing.Sequence[Real] = (9.0, 14.0, 0.01, 5.0),
        use_margin: bool = True,
        use_object: bool = True,
        margin_per_image: bool = False,
        relative_threshold: Real = 0.2,
    ):
        self.alpha = alpha
        self.use_margin = use_margin
        self.use_object = use_object
        self.margin_per_image = margin_per_image
        self.relative_threshold = relative_threshold

    @property
    def alpha(self):
        return self._alpha

    @alpha.setter
    def alpha(self, value: typing.Sequence[Real]):
        if not isinstance(value, (list, tuple)):
            raise TypeError(f"panofourier.LossWeights.alpha should be a list or tuple, not a {type(value)}")
        if len(value) != 4:
            raise ValueError(f"panofourier.LossWeights.alpha should have 4 entries, not {len(value)}")
        for entry in value:
            if not _is_real(entry):
                raise TypeError(f"panofourier.LossWeights.alpha should contain Reals, not a {type(entry)}")
            if entry < 0:
                raise ValueError(f"panofourier.LossWeights.alpha entries should not be negative, not {entry}")
        self._alpha = tuple(float(entry) for entry in value)

    @property
    def use_margin(self):
        return self._use_margin

    @use_margin.setter
    def use_margin(self, value: bool):
        if not isinstance(value, bool):
            raise TypeError(f"panofourier.LossWeights.use_margin should be a bool, not a {type(value)}")
        self._use_margin = value

    @property
    def use_object(self):
        return self._use_object

    @use_object.setter
    def use_object(self, value: bool):
        if not isinstance(value, bool):
            raise TypeError(f"panofourier.LossWeights.use_object should be a bool, not a {type(value)}")
        self._use_object = value

    @property
    def margin_per_image(self):
        return self._margin_per_image

    @margin_per_image.setter
    def margin_per_image(self, value: bool):
        if not isinstance(value, bool):
            raise TypeError(f"panofourier.LossWeights.margin_per_image should be a bool, not a {type(value)}")
        self._margin_per_image = value

    @property
    def relative_threshold(self):
        return self._relative_threshold

    @relative_threshold.setter
    def relative_threshold(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.LossWeights.relative_threshold should be a Real, not a {type(value)}")
        if not 0 < value <= 1:
            raise ValueError(f"panofourier.LossWeights.relative_threshold should be in (0, 1], not {value}")
        self._relative_threshold = float(value)

    def for_mode(self, mode: str) -> "LossWeights":
        """Returns the weights a training mode actually uses.

        depth_only keeps only the depth term and semantic_only only the
        semantic term; joint returns a copy of these weights.
        """
        if mode not in TRAINING_MODES:
            raise ValueError(f"training mode should be one of {TRAINING_MODES}, not {mode!r}")
        alpha = self.alpha
        if mode == "depth_only":
            alpha = (0.0, alpha[1], 0.0, 0.0)
        elif mode == "semantic_only":
            alpha = (alpha[0], 0.0, 0.0, 0.0)
        return LossWeights(
            alpha=alpha,
            use_margin=self.use_margin and mode == "joint",
            use_object=self.use_object and mode == "joint",
            margin_per_image=self.margin_per_image,
            relative_threshold=self.relative_threshold,
        )

    def to_dict(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "use_margin": self.use_margin,
            "use_object": self.use_object,
            "margin_per_image": self.margin_per_image,
            "relative_threshold": self.relative_threshold,
        }


class OptimizerSettings:
    """A class for containing the Adam and learning-rate schedule settings

    The learning rate at step t is
    lr0 * decay_rate ** (t / decay_steps) * step_factor ** (t // step_period).

    Args:
        learning_rate (Real, optional): Initial learning rate lr0. Defaults to 1e-5.
        beta1 (Real, optional): Adam first moment decay. Defaults to 0.9.
        beta2 (Real, optional): Adam second moment decay. Defaults to 0.999.
        eps (Real, optional): Adam epsilon. Defaults to 1e-8.
        decay_rate (Real, optional): Exponential decay factor. Defaults to 0.95.
        decay_steps (int, optional): Steps per exponential decay. Defaults to 1000.
        step_factor (Real, optional): Step decay factor. Defaults to 0.5.
        step_period (int, optional): Steps between step decays. Defaults to 5000.
    """

    def __init__(
        self,
        learning_rate: Real = 1e-5,
        beta1: Real = 0.9,
        beta2: Real = 0.999,
        eps: Real = 1e-8,
        decay_rate: Real = 0.95,
        decay_steps: int = 1000,
        step_factor: Real = 0.5,
        step_period: int = 5000,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.decay_rate = decay_rate
        self.decay_steps = decay_steps
        self.step_factor = step_factor
        self.step_period = step_period

    @property
    def learning_rate(self):
        return self._learning_rate

    @learning_rate.setter
    def learning_rate(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.OptimizerSettings.learning_rate should be a Real, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.OptimizerSettings.learning_rate should be above 0, not {value}")
        self._learning_rate = float(value)

    @property
    def beta1(self):
        return self._beta1

    @beta1.setter
    def beta1(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.OptimizerSettings.beta1 should be a Real, not a {type(value)}")
        if not 0 <= value < 1:
            raise ValueError(f"panofourier.OptimizerSettings.beta1 should be in [0, 1), not {value}")
        self._beta1 = float(value)

    @property
    def beta2(self):
        return self._beta2

    @beta2.setter
    def beta2(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.OptimizerSettings.beta2 should be a Real, not a {type(value)}")
        if not 0 <= value < 1:
            raise ValueError(f"panofourier.OptimizerSettings.beta2 should be in [0, 1), not {value}")
        self._beta2 = float(value)

    @property
    def eps(self):
        return self._eps

    @eps.setter
    def eps(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.OptimizerSettings.eps should be a Real, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.OptimizerSettings.eps should be above 0, not {value}")
        self._eps = float(value)

    @property
    def decay_rate(self):
        return self._decay_rate

    @decay_rate.setter
    def decay_rate(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.OptimizerSettings.decay_rate should be a Real, not a {type(value)}")
        if not 0 < value <= 1:
            raise ValueError(f"panofourier.OptimizerSettings.decay_rate should be in (0, 1], not {value}")
        self._decay_rate = float(value)

    @property
    def decay_steps(self):
        return self._decay_steps

    @decay_steps.setter
    def decay_steps(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.OptimizerSettings.decay_steps should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.OptimizerSettings.decay_steps should be above 0, not {value}")
        self._decay_steps = value

    @property
    def step_factor(self):
        return self._step_factor

    @step_factor.setter
    def step_factor(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.OptimizerSettings.step_factor should be a Real, not a {type(value)}")
        if not 0 < value <= 1:
            raise ValueError(f"panofourier.OptimizerSettings.step_factor should be in (0, 1], not {value}")
        self._step_factor = float(value)

    @property
    def step_period(self):
        return self._step_period

    @step_period.setter
    def step_period(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.OptimizerSettings.step_period should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.OptimizerSettings.step_period should be above 0, not {value}")
        self._step_period = value

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "decay_rate": self.decay_rate,
            "decay_steps": self.decay_steps,
            "step_factor": self.step_factor,
            "step_period": self.step_period,
        }


class Settings:
    """Settings for changing the way the training and evaluation runs

    Args:
        mode (str, optional): Training mode, one of "joint", "depth_only" or
            "semantic_only". Defaults to "joint".
        seed (int, optional): Seed of every random choice of a run. Defaults to 0.
        epochs (int, optional): Passes over the training split. Defaults to 1.
        batch_size (int, optional): Panoramas per training step. Defaults to 4.
        out_dir (str, optional): Directory receiving checkpoints, logs and
            reports. Defaults to "panofourier_run".
        checkpoint_name (str, optional): File stem of the best checkpoint.
            Defaults to "model".
        augment (bool, optional): Apply a random horizontal circular roll to
            each training panorama. Defaults to True.
        unknown_class_id (int, optional): Class excluded from the semantic
            metrics. Defaults to 0.
        ignore_index (int, optional): Label value ignored by the semantic
            loss. Defaults to 255.
        floor_class (int, optional): Floor class id. Defaults to 2.
        ceiling_class (int, optional): Ceiling class id. Defaults to 1.
        wall_class (int, optional): Wall class id. Defaults to 3.
        cell_size (Real, optional): Occupancy grid cell size in meters.
            Defaults to 0.25.
        clearance (Real, optional): Height above the floor below which a
            non-floor point blocks a cell. Defaults to 1.8.
        rmse_log_base (str, optional): Logarithm used by RMSElog, "natural"
            or "10". Defaults to "natural".
        eval_batch_size (int, optional): Panoramas per evaluation forward
            pass. Defaults to 4.
    """

    def __init__(
        self,
        mode: str = "joint",
        seed: int = 0,
        epochs: int = 1,
        batch_size: int = 4,
        out_dir: str = "panofourier_run",
        checkpoint_name: str = "model",
        augment: bool = True,
        unknown_class_id: int = 0,
        ignore_index: int = 255,
        floor_class: int = 2,
        ceiling_class: int = 1,
        wall_class: int = 3,
        cell_size: Real = 0.25,
        clearance: Real = 1.8,
        rmse_log_base: str = "natural",
        eval_batch_size: int = 4,
    ):
        self.mode = mode
        self.seed = seed
        self.epochs = epochs
        self.batch_size = batch_size
        self.out_dir = out_dir
        self.checkpoint_name = checkpoint_name
        self.augment = augment
        self.unknown_class_id = unknown_class_id
        self.ignore_index = ignore_index
        self.floor_class = floor_class
        self.ceiling_class = ceiling_class
        self.wall_class = wall_class
        self.cell_size = cell_size
        self.clearance = clearance
        self.rmse_log_base = rmse_log_base
        self.eval_batch_size = eval_batch_size

    @property
    def mode(self):
        return self._mode

    @mode.setter
    def mode(self, value: str):
        if not isinstance(value, str):
            raise TypeError(f"panofourier.Settings.mode should be a str, not a {type(value)}")
        if value not in TRAINING_MODES:
            raise ValueError(f"panofourier.Settings.mode should be one of {TRAINING_MODES}, not {value!r}")
        self._mode = value

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.seed should be an int, not a {type(value)}")
        if value < 0:
            raise ValueError(f"panofourier.Settings.seed should not be negative, not {value}")
        self._seed = value

    @property
    def epochs(self):
        return self._epochs

    @epochs.setter
    def epochs(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.epochs should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.Settings.epochs should be above 0, not {value}")
        self._epochs = value

    @property
    def batch_size(self):
        return self._batch_size

    @batch_size.setter
    def batch_size(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.batch_size should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.Settings.batch_size should be above 0, not {value}")
        self._batch_size = value

    @property
    def out_dir(self):
        return self._out_dir

    @out_dir.setter
    def out_dir(self, value: str):
        if not isinstance(value, str):
            raise TypeError(f"panofourier.Settings.out_dir should be a str, not a {type(value)}")
        self._out_dir = value

    @property
    def checkpoint_name(self):
        return self._checkpoint_name

    @checkpoint_name.setter
    def checkpoint_name(self, value: str):
        if not isinstance(value, str):
            raise TypeError(f"panofourier.Settings.checkpoint_name should be a str, not a {type(value)}")
        if not value:
            raise ValueError("panofourier.Settings.checkpoint_name should not be empty")
        self._checkpoint_name = value

    @property
    def augment(self):
        return self._augment

    @augment.setter
    def augment(self, value: bool):
        if not isinstance(value, bool):
            raise TypeError(f"panofourier.Settings.augment should be a bool, not a {type(value)}")
        self._augment = value

    @property
    def unknown_class_id(self):
        return self._unknown_class_id

    @unknown_class_id.setter
    def unknown_class_id(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.unknown_class_id should be an int, not a {type(value)}")
        self._unknown_class_id = value

    @property
    def ignore_index(self):
        return self._ignore_index

    @ignore_index.setter
    def ignore_index(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.ignore_index should be an int, not a {type(value)}")
        self._ignore_index = value

    @property
    def floor_class(self):
        return self._floor_class

    @floor_class.setter
    def floor_class(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.floor_class should be an int, not a {type(value)}")
        self._floor_class = value

    @property
    def ceiling_class(self):
        return self._ceiling_class

    @ceiling_class.setter
    def ceiling_class(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.ceiling_class should be an int, not a {type(value)}")
        self._ceiling_class = value

    @property
    def wall_class(self):
        return self._wall_class

    @wall_class.setter
    def wall_class(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.wall_class should be an int, not a {type(value)}")
        self._wall_class = value

    @property
    def cell_size(self):
        return self._cell_size

    @cell_size.setter
    def cell_size(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.Settings.cell_size should be a Real, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.Settings.cell_size should be above 0, not {value}")
        self._cell_size = float(value)

    @property
    def clearance(self):
        return self._clearance

    @clearance.setter
    def clearance(self, value: Real):
        if not _is_real(value):
            raise TypeError(f"panofourier.Settings.clearance should be a Real, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.Settings.clearance should be above 0, not {value}")
        self._clearance = float(value)

    @property
    def rmse_log_base(self):
        return self._rmse_log_base

    @rmse_log_base.setter
    def rmse_log_base(self, value: str):
        if value not in LOG_BASES:
            raise ValueError(f"panofourier.Settings.rmse_log_base should be one of {LOG_BASES}, not {value!r}")
        self._rmse_log_base = value

    @property
    def eval_batch_size(self):
        return self._eval_batch_size

    @eval_batch_size.setter
    def eval_batch_size(self, value: int):
        if not _is_int(value):
            raise TypeError(f"panofourier.Settings.eval_batch_size should be an int, not a {type(value)}")
        if value <= 0:
            raise ValueError(f"panofourier.Settings.eval_batch_size should be above 0, not {value}")
        self._eval_batch_size = value

    @property
    def structural_classes(self) -> typing.Tuple[int, int, int]:
        return (self.ceiling_class, self.floor_class, self.wall_class)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "out_dir": self.out_dir,
            "checkpoint_name": self.checkpoint_name,
            "augment": self.augment,
            "unknown_class_id": self.unknown_class_id,
            "ignore_index": self.ignore_index,
            "floor_class": self.floor_class,
            "ceiling_class": self.ceiling_class,
            "wall_class": self.wall_class,
            "cell_size": self.cell_size,
            "clearance": self.clearance,
            "rmse_log_base": self.rmse_log_base,
            "eval_batch_size": self.eval_batch_size,
        }
