"""Readers and writers of the on-disk sample files: 8-bit PNG, 16-bit PNG
depth and single-channel little-endian PFM."""

import typing
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

PathLike = typing.Union[str, Path]


def _prepare(filename: PathLike) -> Path:
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def read_png(filename: PathLike) -> np.ndarray:
    """Image as an array: (H, W, 3) uint8 for colour, (H, W) for grey or 16-bit."""
    if not Path(filename).is_file():
        raise FileNotFoundError(f"image {filename} not found")
    try:
        with Image.open(filename) as image:
            image.load()
            if image.mode in ("I;16", "I;16B", "I;16L", "I"):
                return np.asarray(image).astype(np.uint16)
            if image.mode == "L":
                return np.asarray(image, dtype=np.uint8).copy()
            return np.asarray(image.convert("RGB"), dtype=np.uint8).copy()
    except (UnidentifiedImageError, OSError) as error:
        raise ValueError(f"{filename} is not a readable image: {error}") from error


def write_rgb_png(filename: PathLike, rgb: np.ndarray):
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"colour image should be (H, W, 3), got shape {rgb.shape}")
    Image.fromarray(rgb.astype(np.uint8)).save(_prepare(filename))


def write_label_png(filename: PathLike, labels: np.ndarray):
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError(f"label map should be (H, W), got shape {labels.shape}")
    if labels.min(initial=0) < 0 or labels.max(initial=0) > 255:
        raise ValueError("label ids must fit in 8 bits")
    Image.fromarray(labels.astype(np.uint8)).save(_prepare(filename))


def write_depth_png16(filename: PathLike, depth: np.ndarray, scale: float = 512.0, sentinel: int = 65535):
    """Depth in meters stored as round(depth * scale); invalid pixels get ``sentinel``."""
    depth = np.asarray(depth, dtype=np.float64)
    raw = np.clip(np.round(depth * scale), 0, 65535).astype(np.uint16)
    raw[depth <= 0] = sentinel
    Image.fromarray(raw).save(_prepare(filename))


def read_depth_png16(filename: PathLike, scale: float = 512.0, sentinel: int = 65535) -> np.ndarray:
    raw = read_png(filename)
    if raw.ndim != 2:
        raise ValueError(f"{filename} is not a single-channel depth image")
    depth = raw.astype(np.float64) / scale
    depth[raw == sentinel] = 0.0
    return depth


def write_pfm(filename: PathLike, values: np.ndarray):
    """Single-channel PFM, little-endian float32, rows stored bottom to top."""
    values = np.asarray(values, dtype="<f4")
    if values.ndim != 2:
        raise ValueError(f"PFM writer expects an (H, W) map, got shape {values.shape}")
    height, width = values.shape
    with open(_prepare(filename), "wb") as f:
        f.write(f"Pf\n{width} {height}\n-1.0\n".encode("ascii"))
        f.write(np.ascontiguousarray(values[::-1]).tobytes())


def read_pfm(filename: PathLike) -> np.ndarray:
    if not Path(filename).is_file():
        raise FileNotFoundError(f"PFM file {filename} not found")
    with open(filename, "rb") as f:
        header = f.readline().strip()
        if header not in (b"Pf", b"PF"):
            raise ValueError(f"{filename} is not a PFM file")
        channels = 3 if header == b"PF" else 1
        try:
            width, height = (int(x) for x in f.readline().split())
            scale = float(f.readline().strip())
        except ValueError as error:
            raise ValueError(f"{filename} has a malformed PFM header") from error
        dtype = "<f4" if scale < 0 else ">f4"
        data = np.frombuffer(f.read(), dtype=dtype)
    expected = width * height * channels
    if data.size != expected:
        raise ValueError(f"{filename} holds {data.size} values, expected {expected}")
    shape = (height, width, channels) if channels == 3 else (height, width)
    return data.reshape(shape)[::-1].astype(np.float64)
