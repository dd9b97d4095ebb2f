"""Writers of the inference products and the training log."""

import json
import logging
import typing
from pathlib import Path

import numpy as np
from PIL import Image
from plyfile import PlyData, PlyElement

from ..geometry.projection import PointCloud
from ..geometry.scene_products import OccupancyGrid

logger = logging.getLogger("general_logger")

PathLike = typing.Union[str, Path]

SUPPORTED_PRODUCTS = ("semantic_cloud", "room_structure", "free_floor", "obstacles")


def _prepare(filename: PathLike) -> Path:
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_ply(filename: PathLike, cloud: PointCloud):
    """ASCII PLY with x, y, z floats, red, green, blue and label bytes per vertex."""
    vertices = np.empty(
        len(cloud),
        dtype=[("x", "f4"), ("y", "f4"), ("z", "f4"), ("red", "u1"), ("green", "u1"), ("blue", "u1"), ("label", "u1")],
    )
    vertices["x"], vertices["y"], vertices["z"] = cloud.points.T
    vertices["red"], vertices["green"], vertices["blue"] = cloud.colors.T
    vertices["label"] = cloud.labels
    PlyData([PlyElement.describe(vertices, "vertex")], text=True).write(str(_prepare(filename)))


def read_ply(filename: PathLike) -> PointCloud:
    if not Path(filename).is_file():
        raise FileNotFoundError(f"PLY file {filename} not found")
    vertex = PlyData.read(str(filename))["vertex"]
    points = np.stack([vertex["x"], vertex["y"], vertex["z"]], axis=-1)
    colors = np.stack([vertex["red"], vertex["green"], vertex["blue"]], axis=-1)
    return PointCloud(points, colors, np.asarray(vertex["label"]))


def write_pgm(filename: PathLike, grid: OccupancyGrid):
    """Binary PGM: 0 obstacle, 128 unknown, 255 free; maximum y on the top row."""
    levels = grid.to_image()
    if levels.size == 0:
        levels = np.full((1, 1), 128, dtype=np.uint8)
    Image.fromarray(levels).save(_prepare(filename), format="PPM")


def write_products(
    out_dir: PathLike,
    cloud: PointCloud,
    structure: PointCloud,
    floor_grid: OccupancyGrid,
    obstacle_grid: OccupancyGrid,
    products: typing.Sequence[str] = SUPPORTED_PRODUCTS,
) -> typing.Dict[str, Path]:
    """Writes the requested reconstruction products into ``out_dir``."""
    for product in products:
        if product not in SUPPORTED_PRODUCTS:
            raise ValueError(f"product {product} not in supported products ({SUPPORTED_PRODUCTS})")
    out_dir = Path(out_dir)
    written = {}
    if "semantic_cloud" in products:
        written["semantic_cloud"] = out_dir / "cloud.ply"
        write_ply(written["semantic_cloud"], cloud)
    if "room_structure" in products:
        written["room_structure"] = out_dir / "room_structure.ply"
        write_ply(written["room_structure"], structure)
    if "free_floor" in products:
        written["free_floor"] = out_dir / "free_floor.pgm"
        write_pgm(written["free_floor"], floor_grid)
    if "obstacles" in products:
        written["obstacles"] = out_dir / "obstacles.pgm"
        write_pgm(written["obstacles"], obstacle_grid)
    for name, path in written.items():
        logger.info(f"wrote {name} to {path}")
    return written


class TrainingLog:
    """Newline-delimited JSON records, one per training step or validation."""

    def __init__(self, filename: PathLike):
        self.filename = _prepare(filename)
        self.filename.write_text("")

    def append(self, record: dict):
        with open(self.filename, "a") as f:
            f.write(json.dumps(record) + "\n")

    def records(self) -> typing.List[dict]:
        return read_training_log(self.filename)


def read_training_log(filename: PathLike) -> typing.List[dict]:
    with open(filename) as f:
        return [json.loads(line) for line in f if line.strip()]
