"""Procedural cuboid rooms with box furniture, ray cast into equirectangular
panoramas with exact depth and labels."""

import logging
import typing

import numpy as np

from ..geometry.projection import RayGrid
from .dataset import Sample

logger = logging.getLogger("general_logger")

CLASS_NAMES = ("unknown", "ceiling", "floor", "wall", "chair", "table", "column")
UNKNOWN, CEILING, FLOOR, WALL, CHAIR, TABLE, COLUMN = range(len(CLASS_NAMES))

DEFAULT_COLORS = {
    CEILING: (235, 232, 220),
    FLOOR: (140, 105, 75),
    WALL: (200, 190, 170),
    CHAIR: (60, 90, 160),
    TABLE: (170, 120, 60),
    COLUMN: (150, 150, 150),
}

# (width, depth, height) in meters; a None height reaches the ceiling
FURNITURE_SIZES = {CHAIR: (0.5, 0.5, 0.9), TABLE: (1.2, 0.8, 0.75), COLUMN: (0.4, 0.4, None)}


class Box:
    """Axis-aligned box [lower, upper] in room coordinates with a class id."""

    def __init__(self, lower: typing.Sequence[float], upper: typing.Sequence[float], class_id: int):
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)
        if self.lower.shape != (3,) or self.upper.shape != (3,):
            raise ValueError("box corners must be 3-vectors")
        if np.any(self.upper <= self.lower):
            raise ValueError(f"box upper corner {self.upper} must exceed lower corner {self.lower}")
        self.class_id = class_id

    def contains(self, point: np.ndarray) -> bool:
        return bool(np.all(point >= self.lower) and np.all(point <= self.upper))


class SceneSpec:
    """A room spanning [0, sx] x [0, sy] x [0, sz] meters, z up.

    Args:
        room_size (typing.Sequence[float]): (sx, sy, sz).
        camera (typing.Sequence[float]): Camera center, strictly inside the room.
        boxes (typing.Sequence[Box], optional): Furniture. Defaults to none.
        colors (dict, optional): RGB per class id. Defaults to DEFAULT_COLORS.
    """

    def __init__(
        self,
        room_size: typing.Sequence[float],
        camera: typing.Sequence[float],
        boxes: typing.Sequence[Box] = (),
        colors: typing.Optional[typing.Dict[int, typing.Tuple[int, int, int]]] = None,
    ):
        self.room_size = np.asarray(room_size, dtype=np.float64)
        self.camera = np.asarray(camera, dtype=np.float64)
        self.boxes = list(boxes)
        self.colors = dict(DEFAULT_COLORS if colors is None else colors)
        if self.room_size.shape != (3,) or np.any(self.room_size <= 0):
            raise ValueError(f"room size must be three positive extents, not {room_size}")
        if self.camera.shape != (3,) or np.any(self.camera <= 0) or np.any(self.camera >= self.room_size):
            raise ValueError(f"camera {camera} is not strictly inside the room {room_size}")
        for box in self.boxes:
            if np.any(box.lower < 0) or np.any(box.upper > self.room_size):
                raise ValueError(f"box {box.lower}-{box.upper} leaves the room {room_size}")
            if box.contains(self.camera):
                raise ValueError(f"camera {camera} lies inside a box")

    def faces(self) -> typing.List[typing.Tuple[int, float, np.ndarray, np.ndarray]]:
        """Every surface rectangle as (axis, coordinate, lower, upper) bounds."""
        faces = []
        for axis in range(3):
            for value in (0.0, self.room_size[axis]):
                faces.append((axis, value, np.zeros(3), self.room_size.copy()))
        for box in self.boxes:
            for axis in range(3):
                for value in (box.lower[axis], box.upper[axis]):
                    faces.append((axis, value, box.lower, box.upper))
        return faces

    def surface_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance of camera-frame points to the nearest surface."""
        return surface_distance(self, np.asarray(points, dtype=np.float64).reshape(-1, 3) + self.camera)


def _room_hits(camera, room_size, directions):
    distance = np.full(directions.shape[:-1], np.inf)
    labels = np.full(directions.shape[:-1], UNKNOWN, dtype=np.uint8)
    with np.errstate(divide="ignore", invalid="ignore"):
        for axis in range(3):
            d = directions[..., axis]
            t = np.where(d > 0, (room_size[axis] - camera[axis]) / d, np.where(d < 0, -camera[axis] / d, np.inf))
            if axis < 2:
                surface = np.full(d.shape, WALL, dtype=np.uint8)
            else:
                surface = np.where(d > 0, CEILING, FLOOR).astype(np.uint8)
            closer = t < distance
            distance = np.where(closer, t, distance)
            labels = np.where(closer, surface, labels)
    return distance, labels


def _box_hits(camera, box, directions):
    near = np.full(directions.shape[:-1], -np.inf)
    far = np.full(directions.shape[:-1], np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        for axis in range(3):
            d = directions[..., axis]
            parallel = d == 0
            t1 = (box.lower[axis] - camera[axis]) / d
            t2 = (box.upper[axis] - camera[axis]) / d
            inside = (camera[axis] >= box.lower[axis]) & (camera[axis] <= box.upper[axis])
            t_low = np.where(parallel, -np.inf if inside else np.inf, np.minimum(t1, t2))
            t_high = np.where(parallel, np.inf if inside else -np.inf, np.maximum(t1, t2))
            near = np.maximum(near, t_low)
            far = np.minimum(far, t_high)
    hit = (near <= far) & (near > 0)
    return np.where(hit, near, np.inf)


def render_scene(spec: SceneSpec, height: int, width: int, sample_id: str = "scene") -> Sample:
    """Casts one ray per pixel and keeps the nearest hit.

    Depth is the Euclidean hit distance, the label the class of the surface
    hit, and the colour the surface colour darkened with distance.
    """
    directions = RayGrid(height, width).directions
    distance, labels = _room_hits(spec.camera, spec.room_size, directions)
    for box in spec.boxes:
        t = _box_hits(spec.camera, box, directions)
        closer = t < distance
        distance = np.where(closer, t, distance)
        labels = np.where(closer, np.uint8(box.class_id), labels)

    palette = np.zeros((256, 3))
    for class_id, color in spec.colors.items():
        palette[class_id] = color
    shading = 1.0 / (1.0 + 0.12 * distance)
    rgb = np.clip(np.round(palette[labels] * (0.35 + 0.65 * shading[..., None])), 0, 255).astype(np.uint8)
    return Sample(rgb=rgb, depth=distance, labels=labels.astype(np.uint8), sample_id=sample_id)


def surface_distance(spec: SceneSpec, points: np.ndarray) -> np.ndarray:
    """Distance of each room-frame point to the nearest surface rectangle of the scene."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    best = np.full(points.shape[0], np.inf)
    for axis, value, lower, upper in spec.faces():
        squared = (points[:, axis] - value) ** 2
        for other in range(3):
            if other == axis:
                continue
            outside = np.maximum(np.maximum(lower[other] - points[:, other], points[:, other] - upper[other]), 0.0)
            squared = squared + outside**2
        best = np.minimum(best, np.sqrt(squared))
    return best


def random_scene(
    rng: np.random.Generator,
    max_boxes: int = 4,
    room_range: typing.Tuple[float, float] = (3.0, 6.0),
    height_range: typing.Tuple[float, float] = (2.4, 3.0),
) -> SceneSpec:
    """Room, camera and furniture drawn from ``rng``; boxes never cover the camera footprint."""
    size = np.array([rng.uniform(*room_range), rng.uniform(*room_range), rng.uniform(*height_range)])
    camera = np.array(
        [rng.uniform(0.8, size[0] - 0.8), rng.uniform(0.8, size[1] - 0.8), rng.uniform(1.0, min(1.6, size[2] - 0.3))]
    )
    boxes = []
    for _ in range(int(rng.integers(0, max_boxes + 1))):
        class_id = int(rng.choice([CHAIR, TABLE, COLUMN]))
        dx, dy, dz = FURNITURE_SIZES[class_id]
        dz = size[2] if dz is None else dz
        for _attempt in range(20):
            x = rng.uniform(0.0, size[0] - dx)
            y = rng.uniform(0.0, size[1] - dy)
            clear_x = camera[0] < x - 0.3 or camera[0] > x + dx + 0.3
            clear_y = camera[1] < y - 0.3 or camera[1] > y + dy + 0.3
            if clear_x or clear_y:
                boxes.append(Box((x, y, 0.0), (x + dx, y + dy, dz), class_id))
                break
    return SceneSpec(size, camera, boxes)


def generate_samples(
    count: int, height: int, seed: int = 0, prefix: str = "synthetic", max_boxes: int = 4
) -> typing.List[Sample]:
    """``count`` rendered random scenes; identical for identical arguments."""
    if count < 0:
        raise ValueError(f"sample count must not be negative, not {count}")
    rng = np.random.default_rng(seed)
    samples = []
    for index in range(count):
        spec = random_scene(rng, max_boxes=max_boxes)
        samples.append(render_scene(spec, height, 2 * height, sample_id=f"{prefix}_{index:05d}"))
    logger.info(f"rendered {count} synthetic panoramas at {2 * height}x{height}")
    return samples
