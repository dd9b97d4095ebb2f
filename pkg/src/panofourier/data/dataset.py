"""Samples, their on-disk layout and batch assembly."""

import logging
import typing
from pathlib import Path

import numpy as np
from tqdm import tqdm

from ..autodiff.tensor import Tensor
from . import image_io

logger = logging.getLogger("general_logger")

IGNORE_LABEL = 255


class Sample:
    """One panorama with its ground truth.

    Args:
        rgb (np.ndarray): (H, W, 3) uint8 colours.
        depth (np.ndarray): (H, W) meters, 0 where unknown.
        labels (np.ndarray): (H, W) class ids, 255 where ignored.
        sample_id (str): Identifier used for file names.
    """

    def __init__(self, rgb: np.ndarray, depth: np.ndarray, labels: np.ndarray, sample_id: str):
        rgb = np.asarray(rgb)
        depth = np.asarray(depth, dtype=np.float64)
        labels = np.asarray(labels)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError(f"sample {sample_id}: colour image should be (H, W, 3), got shape {rgb.shape}")
        height, width = rgb.shape[:2]
        if width != 2 * height:
            raise ValueError(f"sample {sample_id}: panorama width must be twice its height, got {width}x{height}")
        if depth.shape != (height, width) or labels.shape != (height, width):
            raise ValueError(f"sample {sample_id}: depth {depth.shape} and labels {labels.shape} must be {height}x{width}")
        if not np.all(np.isfinite(depth)) or np.any(depth < 0):
            raise ValueError(f"sample {sample_id}: depth must be finite and non-negative")
        if labels.min(initial=0) < 0 or labels.max(initial=0) > 255:
            raise ValueError(f"sample {sample_id}: label ids must fit in 8 bits")
        self.rgb = rgb.astype(np.uint8)
        self.depth = depth
        self.labels = labels.astype(np.uint8)
        self.sample_id = sample_id

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]

    def rolled(self, shift: int) -> "Sample":
        """Horizontal circular roll by ``shift`` columns of every map."""
        return Sample(
            np.roll(self.rgb, shift, axis=1),
            np.roll(self.depth, shift, axis=1),
            np.roll(self.labels, shift, axis=1),
            self.sample_id,
        )


class Batch(typing.NamedTuple):
    input: Tensor
    depth: np.ndarray
    labels: np.ndarray
    valid: np.ndarray
    ids: typing.List[str]


def make_batch(
    samples: typing.Sequence[Sample],
    normalization: typing.Optional[typing.Tuple[typing.Sequence[float], typing.Sequence[float]]] = None,
    augment: typing.Optional[str] = None,
    rng: typing.Optional[np.random.Generator] = None,
    shifts: typing.Optional[typing.Sequence[int]] = None,
) -> Batch:
    """Stacks samples into network input and ground-truth arrays.

    Colours are scaled to [0, 1] and then, when ``normalization`` gives
    per-channel (mean, std), standardized. With ``augment="circular_roll"``
    each sample is rolled by a random column offset drawn from ``rng``, or by
    the entries of ``shifts`` when given.

    Returns:
        Batch: input (B, 3, H, W), depth (B, 1, H, W), labels (B, H, W),
        valid depth mask (B, 1, H, W) and the sample ids.
    """
    if not samples:
        raise ValueError("cannot build a batch from no samples")
    extents = {(s.height, s.width) for s in samples}
    if len(extents) != 1:
        raise ValueError(f"samples of mixed extents {sorted(extents)} cannot share a batch")
    if augment not in (None, "circular_roll"):
        raise ValueError(f"unknown augmentation {augment!r}")

    if augment == "circular_roll":
        width = samples[0].width
        if shifts is None:
            rng = np.random.default_rng() if rng is None else rng
            shifts = [int(rng.integers(0, width)) for _ in samples]
        if len(shifts) != len(samples):
            raise ValueError(f"{len(shifts)} shifts given for {len(samples)} samples")
        samples = [s.rolled(k) for s, k in zip(samples, shifts)]

    panorama = panorama_input([s.rgb for s in samples], normalization)
    depth = np.stack([s.depth for s in samples])[:, None]
    labels = np.stack([s.labels for s in samples]).astype(np.int64)
    return Batch(panorama, depth, labels, depth > 0, [s.sample_id for s in samples])


def panorama_input(
    images: typing.Sequence[np.ndarray],
    normalization: typing.Optional[typing.Tuple[typing.Sequence[float], typing.Sequence[float]]] = None,
) -> Tensor:
    """(B, 3, H, W) network input from (H, W, 3) uint8 colour images."""
    rgb = np.stack([np.asarray(image) for image in images]).astype(np.float64)
    if rgb.ndim != 4 or rgb.shape[3] != 3:
        raise ValueError(f"colour images should be (H, W, 3), got shape {rgb.shape[1:]}")
    rgb = rgb.transpose(0, 3, 1, 2) / 255.0
    if normalization is not None:
        mean, std = (np.asarray(v, dtype=np.float64).reshape(1, 3, 1, 1) for v in normalization)
        rgb = (rgb - mean) / std
    return Tensor(rgb)


def class_weights(samples: typing.Sequence[Sample], num_classes: int, ignore_index: int = IGNORE_LABEL) -> np.ndarray:
    """Median-frequency balancing: median(freq) / freq_i over present classes, 0 for absent ones."""
    if not samples:
        raise ValueError("class weights need a nonempty split")
    counts = np.zeros(num_classes, dtype=np.int64)
    for sample in samples:
        labels = sample.labels[sample.labels != ignore_index]
        labels = labels[labels < num_classes]
        counts += np.bincount(labels.reshape(-1), minlength=num_classes)
    total = counts.sum()
    weights = np.zeros(num_classes)
    if total == 0:
        return weights
    frequency = counts / total
    present = counts > 0
    median = np.median(frequency[present])
    weights[present] = median / frequency[present]
    return weights


def sample_paths(root: typing.Union[str, Path], sample_id: str) -> typing.Dict[str, Path]:
    root = Path(root)
    return {
        "rgb": root / f"{sample_id}_rgb.png",
        "depth": root / f"{sample_id}_depth.pfm",
        "labels": root / f"{sample_id}_labels.png",
    }


def write_sample(root: typing.Union[str, Path], sample: Sample):
    paths = sample_paths(root, sample.sample_id)
    image_io.write_rgb_png(paths["rgb"], sample.rgb)
    image_io.write_pfm(paths["depth"], sample.depth)
    image_io.write_label_png(paths["labels"], sample.labels)


def write_dataset(root: typing.Union[str, Path], split: str, samples: typing.Sequence[Sample]) -> Path:
    """Writes every sample file and the ``<split>.txt`` manifest of ids."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    for sample in tqdm(samples, desc=f"Writing split {split}"):
        write_sample(root, sample)
    manifest = root / f"{split}.txt"
    manifest.write_text("".join(f"{s.sample_id}\n" for s in samples))
    logger.info(f"wrote {len(samples)} samples of split {split} to {root}")
    return manifest


def read_manifest(root: typing.Union[str, Path], split: str) -> typing.List[str]:
    manifest = Path(root) / f"{split}.txt"
    if not manifest.is_file():
        raise FileNotFoundError(f"split manifest {manifest} not found")
    return [line.strip() for line in manifest.read_text().splitlines() if line.strip()]


def load_sample(
    root: typing.Union[str, Path],
    sample_id: str,
    depth_format: str = "pfm",
    depth_scale: float = 512.0,
    depth_sentinel: int = 65535,
) -> Sample:
    """Reads one sample; ``depth_format="png16"`` reads ``<id>_depth.png`` as
    raw / ``depth_scale`` with ``depth_sentinel`` marking invalid pixels."""
    paths = sample_paths(root, sample_id)
    rgb = image_io.read_png(paths["rgb"])
    if rgb.ndim != 3:
        raise ValueError(f"{paths['rgb']} is not a colour image")
    if depth_format == "pfm":
        depth = image_io.read_pfm(paths["depth"])
    elif depth_format == "png16":
        depth = image_io.read_depth_png16(paths["depth"].with_suffix(".png"), depth_scale, depth_sentinel)
    else:
        raise ValueError(f"depth format should be 'pfm' or 'png16', not {depth_format!r}")
    labels = image_io.read_png(paths["labels"])
    if labels.ndim != 2:
        raise ValueError(f"{paths['labels']} is not a single-channel label image")
    return Sample(rgb, depth, labels, sample_id)


def load_split(root: typing.Union[str, Path], split: str, **kwargs) -> typing.List[Sample]:
    ids = read_manifest(root, split)
    samples = [load_sample(root, sample_id, **kwargs) for sample_id in tqdm(ids, desc=f"Loading split {split}")]
    logger.info(f"loaded {len(samples)} samples of split {split} from {root}")
    return samples
