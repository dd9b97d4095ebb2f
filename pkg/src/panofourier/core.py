import inspect
import json
import logging
import time
import typing
from importlib.metadata import version
from pathlib import Path

import numpy as np
from tqdm import tqdm

from .autodiff import Graph, Tensor, no_grad
from .data import CLASS_NAMES, Sample, class_weights, generate_samples, load_split, make_batch, panorama_input
from .data.image_io import write_label_png, write_pfm
from .geometry import backproject, free_floor, obstacle_map, room_structure
from .losses import LossBundle, depth_loss, margin_loss, object_loss, seg_loss, total_loss
from .metrics import ConfusionMatrix, DepthAccumulator, MetricsReport
from .network import Adam, ModelState, PanoramaNet, load_state, save_state
from .utils.data_classes import LossWeights, ModelConfig, OptimizerSettings, Settings
from .utils.log_utils import run_log
from .write import TrainingLog, write_products

logger = logging.getLogger("general_logger")
training_logger = logging.getLogger("training_logger")
logger.info(f"panofourier version {version('panofourier')}")

ABLATION_KINDS = ("loss", "mode")

# (name, use_margin, use_object)
LOSS_ABLATION_ROWS = (
    ("seg_dep", False, False),
    ("seg_dep_mar", True, False),
    ("seg_dep_obj", False, True),
    ("seg_dep_mar_obj", True, True),
)

MODE_ABLATION_ROWS = ("depth_only", "semantic_only", "joint")

CONFIG_SECTIONS = ("ModelConfig", "LossWeights", "OptimizerSettings", "Settings", "load_dataset")


def _check_keys(section: str, values: dict, target: typing.Callable, filename):
    accepted = [name for name in inspect.signature(target).parameters if name != "self"]
    unknown = [key for key in values if key not in accepted]
    if unknown:
        raise ValueError(
            f"Invalid field(s) {unknown} in section '{section}' of config file {filename}. "
            f"Acceptable field names are {accepted}"
        )


class JointTrainer:
    """Trains, evaluates and runs the panorama network.

    Args:
        model_config (panofourier.ModelConfig, optional): Network layout.
            Defaults to a panofourier.ModelConfig with default attribute values.
        loss_weights (panofourier.LossWeights, optional): Weights and toggles
            of the loss terms. Defaults to a panofourier.LossWeights with
            default attribute values.
        optimizer_settings (panofourier.OptimizerSettings, optional): Adam and
            learning-rate schedule settings. Defaults to a
            panofourier.OptimizerSettings with default attribute values.
        settings (panofourier.Settings, optional): Run settings. Defaults to a
            panofourier.Settings with default attribute values.
    """

    def __init__(
        self,
        model_config: typing.Optional[ModelConfig] = None,
        loss_weights: typing.Optional[LossWeights] = None,
        optimizer_settings: typing.Optional[OptimizerSettings] = None,
        settings: typing.Optional[Settings] = None,
    ):
        self.model_config = ModelConfig() if model_config is None else model_config
        self.loss_weights = LossWeights() if loss_weights is None else loss_weights
        self.optimizer_settings = OptimizerSettings() if optimizer_settings is None else optimizer_settings
        self.settings = Settings() if settings is None else settings

        # define later when running the code
        self.train_samples: typing.List[Sample] = []
        self.val_samples: typing.List[Sample] = []
        self.model = None
        self.optimizer = None
        self.best_report = None
        self.best_score = None

    @property
    def model_config(self):
        return self._model_config

    @model_config.setter
    def model_config(self, value: ModelConfig):
        if not isinstance(value, ModelConfig):
            raise TypeError(
                f"panofourier.JointTrainer.model_config should be an instance of panofourier.ModelConfig, not a {type(value)}"
            )
        self._model_config = value

    @property
    def loss_weights(self):
        return self._loss_weights

    @loss_weights.setter
    def loss_weights(self, value: LossWeights):
        if not isinstance(value, LossWeights):
            raise TypeError(
                f"panofourier.JointTrainer.loss_weights should be an instance of panofourier.LossWeights, not a {type(value)}"
            )
        self._loss_weights = value

    @property
    def optimizer_settings(self):
        return self._optimizer_settings

    @optimizer_settings.setter
    def optimizer_settings(self, value: OptimizerSettings):
        if not isinstance(value, OptimizerSettings):
            raise TypeError(
                "panofourier.JointTrainer.optimizer_settings should be an instance of "
                f"panofourier.OptimizerSettings, not a {type(value)}"
            )
        self._optimizer_settings = value

    @property
    def settings(self):
        return self._settings

    @settings.setter
    def settings(self, value: Settings):
        if not isinstance(value, Settings):
            raise TypeError(f"panofourier.JointTrainer.settings should be an instance of panofourier.Settings, not a {type(value)}")
        self._settings = value

    @property
    def checkpoint_path(self) -> Path:
        return Path(self.settings.out_dir) / f"{self.settings.checkpoint_name}.fdsn"

    @property
    def class_names(self) -> typing.Optional[typing.List[str]]:
        if self.model_config.num_classes == len(CLASS_NAMES):
            return list(CLASS_NAMES)
        return None

    @classmethod
    def from_json(cls, filename: typing.Union[str, Path], load_data: bool = True):
        """Creates a JointTrainer from a JSON config and loads its dataset.

        Each of the sections ModelConfig, LossWeights, OptimizerSettings and
        Settings populates the config class of the same name; the
        load_dataset section holds the arguments of JointTrainer.load_dataset().
        Training is left to the caller.

        Args:
            filename (str): The filename of the config file.
            load_data (bool, optional): Run load_dataset with the load_dataset
                section. Defaults to True.

        Raises:
            FileNotFoundError: If the config file is not found
            ValueError: If the config JSON file contains an invalid section or field

        Returns:
            panofourier.JointTrainer: the configured trainer.
        """

        if not Path(filename).exists():
            raise FileNotFoundError(f"config file {filename} not found")

        with open(filename) as f:
            config = json.load(f)

        trainer = cls()

        for key in config.keys():

            if key == "load_dataset":
                pass  # used after the model layout is known

            elif key == "ModelConfig":
                _check_keys(key, config[key], ModelConfig, filename)
                trainer.model_config = ModelConfig(**config[key])

            elif key == "LossWeights":
                _check_keys(key, config[key], LossWeights, filename)
                trainer.loss_weights = LossWeights(**config[key])

            elif key == "OptimizerSettings":
                _check_keys(key, config[key], OptimizerSettings, filename)
                trainer.optimizer_settings = OptimizerSettings(**config[key])

            elif key == "Settings":
                _check_keys(key, config[key], Settings, filename)
                trainer.settings = Settings(**config[key])

            else:
                raise ValueError(
                    f"Invalid key '{key}' found in config file {filename}. Acceptable key names are "
                    + ", ".join(f"'{name}'" for name in CONFIG_SECTIONS)
                )

        if load_data and "load_dataset" in config.keys():
            _check_keys("load_dataset", config["load_dataset"], trainer.load_dataset, filename)
            trainer.load_dataset(**config["load_dataset"])
        return trainer

    def copy(self, **overrides) -> "JointTrainer":
        """New trainer with copies of the config objects and the same samples.

        ``overrides`` are Settings or LossWeights attribute values.
        """
        settings = self.settings.to_dict()
        weights = self.loss_weights.to_dict()
        for key, value in overrides.items():
            if key in settings:
                settings[key] = value
            elif key in weights:
                weights[key] = value
            else:
                raise ValueError(f"{key} is neither a Settings nor a LossWeights attribute")
        trainer = JointTrainer(
            ModelConfig(**self.model_config.to_dict()),
            LossWeights(**weights),
            OptimizerSettings(**self.optimizer_settings.to_dict()),
            Settings(**settings),
        )
        trainer.train_samples = self.train_samples
        trainer.val_samples = self.val_samples
        return trainer

    def load_dataset(
        self,
        path: typing.Optional[str] = None,
        train_split: str = "train",
        val_split: typing.Optional[str] = None,
        synthetic_count: int = 0,
        synthetic_val_count: int = 0,
        synthetic_seed: int = 0,
        depth_format: str = "pfm",
    ):
        """Loads the training and validation samples.

        Samples come from the split manifests under ``path``, from the
        synthetic generator, or both (synthetic samples are appended).

        Args:
            path (str, optional): Dataset root holding ``<split>.txt``
                manifests. Defaults to None.
            train_split (str, optional): Training split name. Defaults to "train".
            val_split (str, optional): Validation split name; without one the
                training samples are also used for validation. Defaults to None.
            synthetic_count (int, optional): Synthetic training panoramas to
                render. Defaults to 0.
            synthetic_val_count (int, optional): Synthetic validation
                panoramas to render. Defaults to 0.
            synthetic_seed (int, optional): Seed of the synthetic scenes.
                Defaults to 0.
            depth_format (str, optional): "pfm" or "png16". Defaults to "pfm".
        """
        logger.info("Start of dataset loading phase")

        if path is not None and not isinstance(path, str):
            raise TypeError(f"path should be a str or None, not a {type(path)}")
        for arg, arg_str in ((synthetic_count, "synthetic_count"), (synthetic_val_count, "synthetic_val_count")):
            if not isinstance(arg, int) or isinstance(arg, bool):
                raise TypeError(f"{arg_str} should be of type int not {type(arg)}")
            if arg < 0:
                raise ValueError(f"{arg_str} should not be negative, not {arg}")

        train, val = [], []
        if path is not None:
            if not Path(path).is_dir():
                raise FileNotFoundError(f"dataset directory {path} not found")
            train += load_split(path, train_split, depth_format=depth_format)
            if val_split is not None:
                val += load_split(path, val_split, depth_format=depth_format)
        height = self.model_config.height
        train += generate_samples(synthetic_count, height, seed=synthetic_seed, prefix="synthetic_train")
        val += generate_samples(synthetic_val_count, height, seed=synthetic_seed + 1, prefix="synthetic_val")

        if not train:
            raise ValueError("no training samples: give a dataset path or a positive synthetic_count")
        for sample in train + val:
            if (sample.height, sample.width) != (self.model_config.height, self.model_config.width):
                raise ValueError(
                    f"sample {sample.sample_id} has extent {sample.width}x{sample.height} but the model expects "
                    f"{self.model_config.width}x{self.model_config.height}"
                )
        self.train_samples = train
        self.val_samples = val
        logger.info(f"End of dataset loading phase: {len(train)} training and {len(val)} validation samples")
        return self.train_samples, self.val_samples

    def build_model(self) -> PanoramaNet:
        """Fresh network and optimizer initialized from Settings.seed."""
        self.model = PanoramaNet(self.model_config, seed=self.settings.seed)
        self.optimizer = Adam(self.model.parameters(), self.optimizer_settings)
        return self.model

    def load_checkpoint(self, filename: typing.Union[str, Path]) -> PanoramaNet:
        """Replaces the model with the one stored in ``filename`` and its layout sidecar."""
        state = load_state(filename)
        self.model_config = state.config
        self.model = state.build(seed=self.settings.seed)
        self.optimizer = Adam(self.model.parameters(), self.optimizer_settings)
        return self.model

    def _require_model(self) -> PanoramaNet:
        if self.model is None:
            self.build_model()
        return self.model

    def train_step(self, batch, weights_per_class: np.ndarray) -> LossBundle:
        """One optimizer step on ``batch``. Only the terms the training mode
        uses are evaluated, so an unused branch is never run."""
        model = self._require_model()
        mode = self.settings.mode
        weights = self.loss_weights.for_mode(mode)
        config = self.model_config
        model.train()

        with Graph():
            outputs = model.decode(batch.input)
            l_seg = l_dep = l_mar = l_obj = Tensor(0.0)
            c1 = c2 = None
            if mode != "depth_only":
                logits = model.semantic(outputs[-config.semantic_fusion :])
                l_seg = seg_loss(logits, batch.labels, weights_per_class, self.settings.ignore_index)
            if mode != "semantic_only":
                depth = model.depth(outputs[-config.depth_fusion :])
                l_dep, c1, c2 = depth_loss(
                    depth,
                    batch.depth,
                    batch.valid,
                    relative_threshold=weights.relative_threshold,
                    padding_mode=config.padding_mode,
                )
                if weights.use_margin:
                    l_mar = margin_loss(depth, batch.depth, batch.valid, per_image=weights.margin_per_image)
                if weights.use_object:
                    l_obj = object_loss(depth, batch.depth, batch.labels, config.num_classes, batch.valid)
            bundle = total_loss([l_seg, l_dep, l_mar, l_obj], weights, c1, c2)
            self.optimizer.zero_grad()
            bundle.l_total.backward()
            self.optimizer.step()
        return bundle

    def train(self) -> MetricsReport:
        """Runs Settings.epochs epochs and keeps the best validation checkpoint.

        Every step and every validation is appended to
        ``<out_dir>/train_log.jsonl``; the best checkpoint is written to
        ``<out_dir>/<checkpoint_name>.fdsn`` with its layout sidecar. The
        package log records of the run are copied to ``<out_dir>/panofourier.log``.

        Returns:
            panofourier.MetricsReport: validation report of the best checkpoint.
        """
        logger.info("Start of training phase")
        if not self.train_samples:
            raise ValueError("no training samples loaded, run JointTrainer.load_dataset() first")
        self.build_model()
        settings = self.settings
        out_dir = Path(settings.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "run_config.json", "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        with run_log(out_dir):
            return self._run_epochs(out_dir)

    def _run_epochs(self, out_dir: Path) -> MetricsReport:
        settings = self.settings
        log = TrainingLog(out_dir / "train_log.jsonl")
        rng = np.random.default_rng(settings.seed + 1)
        weights_per_class = class_weights(self.train_samples, self.model_config.num_classes, settings.ignore_index)
        validation = self.val_samples if self.val_samples else self.train_samples
        augment = "circular_roll" if settings.augment else None
        self.best_report = None
        self.best_score = None

        for epoch in tqdm(range(settings.epochs), desc="Training epochs"):
            order = rng.permutation(len(self.train_samples))
            for start in tqdm(range(0, len(order), settings.batch_size), desc=f"Epoch {epoch}", leave=False):
                chosen = [self.train_samples[i] for i in order[start : start + settings.batch_size]]
                batch = make_batch(chosen, augment=augment, rng=rng)
                learning_rate = self.optimizer.learning_rate
                bundle = self.train_step(batch, weights_per_class)
                record = {"type": "step", "epoch": epoch, "step": self.optimizer.t, "learning_rate": learning_rate}
                record.update(bundle.as_dict())
                log.append(record)
                training_logger.info(json.dumps(record))

            report = self.evaluate(validation)
            score = report.score(settings.mode)
            log.append({"type": "epoch", "epoch": epoch, "score": score, "metrics": report.to_dict()})
            training_logger.info(f"epoch {epoch} validation score {score:.6f}: {json.dumps(report.to_dict())}")
            if self.best_score is None or score > self.best_score:
                self.best_score = score
                self.best_report = report
                save_state(self.checkpoint_path, ModelState.from_model(self.model))
                self.best_report.write(out_dir / "best_metrics.json")

        logger.info(f"End of training phase, best validation score {self.best_score:.6f}")
        return self.best_report

    def predict(self, panorama: Tensor) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Depth (B, H, W) and argmax labels (B, H, W) with running BN statistics."""
        model = self._require_model()
        model.eval()
        with no_grad():
            logits, depth = model(panorama)
        return depth.data[:, 0], np.argmax(logits.data, axis=1)

    def evaluate(self, samples: typing.Sequence[Sample], oracle: bool = False) -> MetricsReport:
        """Depth and segmentation metrics of ``samples``.

        With ``oracle`` the ground truth itself is scored as the prediction.
        """
        if not samples:
            raise ValueError("cannot evaluate an empty split")
        depth = DepthAccumulator(self.settings.rmse_log_base)
        confusion = ConfusionMatrix(self.model_config.num_classes, self.settings.unknown_class_id)
        batch_size = self.settings.eval_batch_size
        for start in tqdm(range(0, len(samples), batch_size), desc="Evaluating", leave=False):
            batch = make_batch(samples[start : start + batch_size])
            if oracle:
                pred_depth, pred_labels = batch.depth[:, 0], batch.labels
            else:
                pred_depth, pred_labels = self.predict(batch.input)
            depth.add(pred_depth, batch.depth[:, 0], batch.valid[:, 0])
            confusion.add(pred_labels, batch.labels)
        return MetricsReport.from_accumulators(depth, confusion, self.class_names)

    def infer(
        self,
        rgb: np.ndarray,
        out_dir: typing.Union[str, Path],
        reconstruct: bool = False,
    ) -> typing.Dict[str, Path]:
        """Predicts one panorama and writes depth.pfm and labels.png to ``out_dir``.

        With ``reconstruct`` the semantic cloud, room structure, free-floor
        and obstacle grids are written as well.
        """
        rgb = np.asarray(rgb)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError(f"panorama should be an (H, W, 3) colour image, got shape {rgb.shape}")
        height, width = rgb.shape[:2]
        ModelConfig.check_extent(height, width)
        model = self._require_model()
        original = model.config.height
        model.at_extent(height)
        try:
            depth, labels = self.predict(panorama_input([rgb]))
        finally:
            model.at_extent(original)
        depth, labels = depth[0], labels[0].astype(np.uint8)
        out_dir = Path(out_dir)
        written = {"depth": out_dir / "depth.pfm", "labels": out_dir / "labels.png"}
        write_pfm(written["depth"], depth)
        write_label_png(written["labels"], labels)

        if reconstruct:
            settings = self.settings
            cloud = backproject(depth, rgb, labels)
            structure = room_structure(cloud, settings.structural_classes)
            floor = free_floor(cloud, settings.floor_class, settings.cell_size, settings.clearance)
            obstacles = obstacle_map(
                cloud, settings.floor_class, settings.cell_size, settings.clearance, classes_to_exclude=(settings.ceiling_class,)
            )
            written.update(write_products(out_dir, cloud, structure, floor, obstacles))
        logger.info(f"inference on a {width}x{height} panorama written to {out_dir}")
        return written

    def benchmark(self, height: typing.Optional[int] = None, iterations: int = 10) -> dict:
        """Wall time of the forward pass at a given extent.

        One untimed warm-up pass precedes ``iterations`` timed ones.

        Returns:
            dict: extent ("WxH"), iterations, mean_seconds, std_seconds and fps.
        """
        if not isinstance(iterations, int) or iterations < 10:
            raise ValueError(f"benchmark needs at least 10 iterations, not {iterations}")
        model = self._require_model()
        original = model.config.height
        height = original if height is None else height
        ModelConfig.check_extent(height, 2 * height)
        model.at_extent(height)
        model.eval()

        rng = np.random.default_rng(self.settings.seed)
        panorama = Tensor(rng.random((1, 3, height, 2 * height)))
        times = []
        try:
            with no_grad():
                model(panorama)
                for _ in tqdm(range(iterations), desc=f"Benchmark {2 * height}x{height}"):
                    start = time.perf_counter()
                    model(panorama)
                    times.append(time.perf_counter() - start)
        finally:
            model.at_extent(original)

        mean = float(np.mean(times))
        report = {
            "extent": f"{2 * height}x{height}",
            "iterations": iterations,
            "mean_seconds": mean,
            "std_seconds": float(np.std(times)),
            "fps": 1.0 / mean,
        }
        logger.info(f"benchmark: {json.dumps(report)}")
        return report

    def run_ablation(self, kind: str) -> typing.List[dict]:
        """Trains one model per loss configuration or per training mode.

        Each run writes into ``<out_dir>/ablation_<kind>/<row name>`` and the
        table of best validation MRE, MAE, mIoU and mAcc goes to
        ``<out_dir>/ablation_<kind>.json``. Columns a mode does not train are null.
        """
        if kind not in ABLATION_KINDS:
            raise ValueError(f"ablation kind should be one of {ABLATION_KINDS}, not {kind!r}")
        if kind == "loss":
            runs = [
                (name, {"mode": "joint", "use_margin": use_margin, "use_object": use_object})
                for name, use_margin, use_object in LOSS_ABLATION_ROWS
            ]
        else:
            runs = [(mode, {"mode": mode}) for mode in MODE_ABLATION_ROWS]

        out_dir = Path(self.settings.out_dir)
        rows = []
        for name, overrides in runs:
            logger.info(f"ablation {kind}: run {name}")
            trainer = self.copy(out_dir=str(out_dir / f"ablation_{kind}" / name), **overrides)
            report = trainer.train()
            mode = overrides["mode"]
            depth_trained = mode != "semantic_only"
            semantic_trained = mode != "depth_only"
            rows.append(
                {
                    "name": name,
                    "mode": mode,
                    "use_margin": trainer.loss_weights.for_mode(mode).use_margin,
                    "use_object": trainer.loss_weights.for_mode(mode).use_object,
                    "MRE": report.mre if depth_trained else None,
                    "MAE": report.mae if depth_trained else None,
                    "mIoU": report.miou if semantic_trained else None,
                    "mAcc": report.macc if semantic_trained else None,
                }
            )

        table = out_dir / f"ablation_{kind}.json"
        table.parent.mkdir(parents=True, exist_ok=True)
        with open(table, "w") as f:
            json.dump({"kind": kind, "rows": rows}, f, indent=2)
        logger.info(f"ablation table written to {table}")
        return rows

    def to_dict(self) -> dict:
        return {
            "ModelConfig": self.model_config.to_dict(),
            "LossWeights": self.loss_weights.to_dict(),
            "OptimizerSettings": self.optimizer_settings.to_dict(),
            "Settings": self.settings.to_dict(),
        }
