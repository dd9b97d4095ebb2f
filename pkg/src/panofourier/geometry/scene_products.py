"""Floor-plane grids and filtered clouds built from a semantic point cloud."""

import logging
import math
import typing

import numpy as np

from .projection import PointCloud

logger = logging.getLogger("general_logger")

UNKNOWN = 0
FREE = 1
OBSTACLE = 2

# PGM grey level per state
PGM_LEVELS = {OBSTACLE: 0, UNKNOWN: 128, FREE: 255}

# ceiling id of the default class list
DEFAULT_EXCLUDED = (1,)


class OccupancyGrid:
    """2-D grid over the floor plane.

    ``states[iy, ix]`` covers x in [origin_x + ix * cell, origin_x + (ix + 1) * cell)
    and likewise for y.

    Args:
        states (np.ndarray): (ny, nx) array of UNKNOWN, FREE or OBSTACLE.
        origin (typing.Tuple[float, float]): Minimum (x, y) corner in meters.
        cell_size (float): Cell edge in meters.
    """

    def __init__(self, states: np.ndarray, origin: typing.Tuple[float, float], cell_size: float):
        if not cell_size > 0:
            raise ValueError(f"cell size must be positive, not {cell_size}")
        self.states = np.asarray(states, dtype=np.uint8)
        self.origin = (float(origin[0]), float(origin[1]))
        self.cell_size = float(cell_size)

    @property
    def shape(self):
        return self.states.shape

    def count(self, state: int) -> int:
        return int(np.sum(self.states == state))

    def counts(self) -> typing.Dict[str, int]:
        return {"free": self.count(FREE), "obstacle": self.count(OBSTACLE), "unknown": self.count(UNKNOWN)}

    def to_image(self) -> np.ndarray:
        """Grey image with the maximum y on the top row."""
        levels = np.full(self.states.shape, PGM_LEVELS[UNKNOWN], dtype=np.uint8)
        levels[self.states == FREE] = PGM_LEVELS[FREE]
        levels[self.states == OBSTACLE] = PGM_LEVELS[OBSTACLE]
        return levels[::-1]

    @classmethod
    def empty(cls, cell_size: float) -> "OccupancyGrid":
        return cls(np.zeros((0, 0), dtype=np.uint8), (0.0, 0.0), cell_size)

    def __eq__(self, other):
        return (
            isinstance(other, OccupancyGrid)
            and self.cell_size == other.cell_size
            and self.origin == other.origin
            and np.array_equal(self.states, other.states)
        )


def _cells(extent: float, cell_size: float) -> int:
    return max(1, math.ceil(extent / cell_size - 1e-9))


def floor_height(cloud: PointCloud, floor_class: int) -> float:
    """Median z of the floor points, or the lowest point without any."""
    floor = cloud.points[cloud.labels == floor_class, 2]
    if floor.size:
        return float(np.median(floor))
    return float(cloud.points[:, 2].min())


def rasterize(
    cloud: PointCloud,
    floor_class: int,
    cell_size: float,
    clearance: float,
    reference_height: typing.Optional[float] = None,
) -> OccupancyGrid:
    """Floor points mark cells free; other points lower than ``clearance``
    above the floor mark them obstacle. Obstacle wins over free."""
    if not cell_size > 0:
        raise ValueError(f"cell size must be positive, not {cell_size}")
    if not clearance > 0:
        raise ValueError(f"clearance must be positive, not {clearance}")
    if len(cloud) == 0:
        return OccupancyGrid.empty(cell_size)

    xy = cloud.points[:, :2]
    lower = xy.min(axis=0)
    extent = xy.max(axis=0) - lower
    nx, ny = _cells(extent[0], cell_size), _cells(extent[1], cell_size)
    ix = np.minimum(np.floor((xy[:, 0] - lower[0]) / cell_size).astype(np.int64), nx - 1)
    iy = np.minimum(np.floor((xy[:, 1] - lower[1]) / cell_size).astype(np.int64), ny - 1)

    base = floor_height(cloud, floor_class) if reference_height is None else reference_height
    height = cloud.points[:, 2] - base
    is_floor = cloud.labels == floor_class
    blocking = ~is_floor & (height < clearance)

    states = np.full((ny, nx), UNKNOWN, dtype=np.uint8)
    states[iy[is_floor], ix[is_floor]] = FREE
    states[iy[blocking], ix[blocking]] = OBSTACLE
    return OccupancyGrid(states, (lower[0], lower[1]), cell_size)


def free_floor(cloud: PointCloud, floor_class: int, cell_size: float, clearance: float = 1.8) -> OccupancyGrid:
    """Navigable floor: free where floor was seen, obstacle under low objects, unknown elsewhere."""
    grid = rasterize(cloud, floor_class, cell_size, clearance)
    logger.debug(f"free floor grid {grid.shape}: {grid.count(FREE)} free, {grid.count(OBSTACLE)} obstacle cells")
    return grid


def obstacle_map(
    cloud: PointCloud,
    floor_class: int,
    cell_size: float,
    clearance: float = 1.8,
    classes_to_exclude: typing.Iterable[int] = DEFAULT_EXCLUDED,
) -> OccupancyGrid:
    """Room-and-obstacles grid; points of ``classes_to_exclude`` (the ceiling by default) are dropped before gridding."""
    if not clearance > 0:
        raise ValueError(f"clearance must be positive, not {clearance}")
    kept = cloud.filter_classes(classes_to_exclude, keep=False)
    grid = rasterize(kept, floor_class, cell_size, clearance)
    logger.debug(f"obstacle grid {grid.shape}: {grid.count(OBSTACLE)} obstacle cells")
    return grid


def room_structure(cloud: PointCloud, structural_classes: typing.Iterable[int]) -> PointCloud:
    """Only the points labelled with one of ``structural_classes``."""
    return cloud.filter_classes(structural_classes, keep=True)
