"""Equirectangular camera model and back-projection.

Camera frame is z-up, longitude 0 at the image center column and pixel
centers at half-integers. Depth is the Euclidean distance along the ray.
"""

import functools
import typing

import numpy as np


def _angles(u, v, height: int, width: int):
    longitude = 2.0 * np.pi * (np.asarray(u, dtype=np.float64) + 0.5) / width - np.pi
    latitude = np.pi / 2.0 - np.pi * (np.asarray(v, dtype=np.float64) + 0.5) / height
    return longitude, latitude


def _directions(longitude, latitude) -> np.ndarray:
    cos_lat = np.cos(latitude)
    return np.stack([cos_lat * np.cos(longitude), cos_lat * np.sin(longitude), np.sin(latitude)], axis=-1)


def pixel_to_ray(u: float, v: float, height: int, width: int) -> np.ndarray:
    """Unit direction of the (possibly fractional) pixel (u, v)."""
    if height <= 0 or width <= 0:
        raise ValueError(f"image extent must be positive, got {width}x{height}")
    if not (0 <= u < width and 0 <= v < height):
        raise ValueError(f"pixel ({u}, {v}) lies outside a {width}x{height} image")
    return _directions(*_angles(u, v, height, width))


@functools.lru_cache(maxsize=16)
def _ray_grid(height: int, width: int) -> np.ndarray:
    vv, uu = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    directions = _directions(*_angles(uu, vv, height, width))
    directions.flags.writeable = False
    return directions


def ray_grid(height: int, width: int) -> np.ndarray:
    """(H, W, 3) unit directions of every pixel center."""
    return RayGrid(height, width).directions


class RayGrid:
    """Per-pixel unit directions of an H x W equirectangular image, shape (H, W, 3)."""

    def __init__(self, height: int, width: int):
        if height <= 0 or width <= 0:
            raise ValueError(f"image extent must be positive, got {width}x{height}")
        self.height = height
        self.width = width
        self.directions = _ray_grid(height, width)

    @property
    def shape(self):
        return self.directions.shape

    def __getitem__(self, index):
        return self.directions[index]


class PointCloud:
    """Points in meters (camera frame) with 8-bit colors and class labels.

    Args:
        points (np.ndarray): N x 3 coordinates.
        colors (np.ndarray, optional): N x 3 uint8. Defaults to grey.
        labels (np.ndarray, optional): N class ids. Defaults to 0.
    """

    def __init__(
        self,
        points: np.ndarray,
        colors: typing.Optional[np.ndarray] = None,
        labels: typing.Optional[np.ndarray] = None,
    ):
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if not np.isfinite(points).all():
            raise ValueError("point cloud coordinates must be finite")
        count = points.shape[0]
        colors = np.full((count, 3), 128, dtype=np.uint8) if colors is None else np.asarray(colors, dtype=np.uint8)
        labels = np.zeros(count, dtype=np.uint8) if labels is None else np.asarray(labels, dtype=np.uint8)
        if colors.shape != (count, 3) or labels.shape != (count,):
            raise ValueError(f"colors {colors.shape} and labels {labels.shape} do not match {count} points")
        self.points = points
        self.colors = colors
        self.labels = labels

    def __len__(self):
        return self.points.shape[0]

    def select(self, mask: np.ndarray) -> "PointCloud":
        return PointCloud(self.points[mask], self.colors[mask], self.labels[mask])

    def filter_classes(self, classes: typing.Iterable[int], keep: bool = True) -> "PointCloud":
        chosen = np.isin(self.labels, list(classes))
        return self.select(chosen if keep else ~chosen)

    def translated(self, offset: typing.Sequence[float]) -> "PointCloud":
        return PointCloud(self.points + np.asarray(offset, dtype=np.float64), self.colors, self.labels)


def backproject(
    depth: np.ndarray,
    rgb: typing.Optional[np.ndarray] = None,
    labels: typing.Optional[np.ndarray] = None,
    valid_mask: typing.Optional[np.ndarray] = None,
) -> PointCloud:
    """point = depth(u, v) * ray(u, v) for every valid pixel, in row-major order.

    Pixels with depth <= 0 are invalid unless ``valid_mask`` says otherwise.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2:
        raise ValueError(f"depth should be an (H, W) map, got shape {depth.shape}")
    height, width = depth.shape
    valid = depth > 0 if valid_mask is None else np.asarray(valid_mask, dtype=bool)
    if valid.shape != depth.shape:
        raise ValueError(f"mask of shape {valid.shape} does not match depth {depth.shape}")
    directions = RayGrid(height, width).directions
    points = depth[valid][:, None] * directions[valid]
    colors = np.asarray(rgb)[valid] if rgb is not None else None
    point_labels = np.asarray(labels)[valid] if labels is not None else None
    return PointCloud(points, colors, point_labels)
