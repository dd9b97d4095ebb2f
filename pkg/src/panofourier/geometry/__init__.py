from .projection import PointCloud, RayGrid, backproject, pixel_to_ray, ray_grid
from .scene_products import (
    FREE,
    OBSTACLE,
    UNKNOWN,
    OccupancyGrid,
    floor_height,
    free_floor,
    obstacle_map,
    rasterize,
    room_structure,
)
