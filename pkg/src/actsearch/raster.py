"""
Rasterization of labeled points onto per-class pixel count planes.

The image is square. Column 0 is `xmin`, row 0 is `ymax` (top row holds the
largest y), and a point outside the bounds is clamped to the nearest edge
pixel. Each class gets its own count plane; every pixel keeps the number of
points of that class that fall on it.
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from actsearch.dataset import DEFAULT_MARGIN_FRACTION, Dataset, WorldBounds, compute_bounds
from actsearch.errors import ConfigurationError


class Metric(str, Enum):
    L2 = "l2"
    L1 = "l1"


class PixelCoord(NamedTuple):
    col: int
    row: int


@dataclass(frozen=True)
class GridConfig:
    resolution: int
    bounds: WorldBounds
    metric: Metric = Metric.L2

    def __post_init__(self):
        if self.resolution < 1:
            raise ConfigurationError(f"resolution must be >= 1, got {self.resolution}")
        object.__setattr__(self, "metric", Metric(self.metric))


def grid_config(
    ds: Dataset,
    resolution: int,
    metric: Metric = Metric.L2,
    margin_fraction: float = DEFAULT_MARGIN_FRACTION,
) -> GridConfig:
    """GridConfig whose bounds are computed from the data."""
    return GridConfig(resolution, compute_bounds(ds, margin_fraction), Metric(metric))


def pixels_of(
    cfg: GridConfig, xs: np.ndarray, ys: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized world -> pixel map; returns (cols, rows) as int64 arrays."""
    b, res = cfg.bounds, cfg.resolution
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        fx = np.floor(np.nan_to_num((xs - b.xmin) / (b.xmax - b.xmin) * res))
        fy = np.floor(np.nan_to_num((ys - b.ymin) / (b.ymax - b.ymin) * res))
    cols = np.clip(fx, 0, res - 1).astype(np.int64)
    rows = (res - 1) - np.clip(fy, 0, res - 1).astype(np.int64)
    return cols, rows


def pixel_of(cfg: GridConfig, x: float, y: float) -> PixelCoord:
    cols, rows = pixels_of(cfg, np.array([x]), np.array([y]))
    return PixelCoord(int(cols[0]), int(rows[0]))


@dataclass(frozen=True, eq=False)
class RasterGrid:
    """
    The rasterized dataset.

    counts has shape (num_classes, resolution, resolution). row_prefix holds,
    per class and row, the running sum of counts along the columns with a
    leading zero column, so any horizontal pixel span is counted with two
    reads. Buckets are stored CSR style: the ids of the points on pixel
    `row * resolution + col` are
    `bucket_ids[bucket_offsets[lin]:bucket_offsets[lin + 1]]`, in dataset order.
    """

    config: GridConfig
    num_classes: int
    counts: np.ndarray
    row_prefix: np.ndarray
    occupancy: np.ndarray
    total_points: int
    bucket_offsets: Optional[np.ndarray] = None
    bucket_ids: Optional[np.ndarray] = None
    point_labels: Optional[np.ndarray] = None

    @property
    def resolution(self) -> int:
        return self.config.resolution

    @property
    def has_buckets(self) -> bool:
        return self.bucket_ids is not None

    def contains(self, pixel: PixelCoord) -> bool:
        return 0 <= pixel.col < self.resolution and 0 <= pixel.row < self.resolution


def _readonly(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


def rasterize(ds: Dataset, cfg: GridConfig, keep_buckets: bool = False) -> RasterGrid:
    res = cfg.resolution
    cols, rows = pixels_of(cfg, ds.xs, ds.ys)

    counts = np.zeros((ds.num_classes, res, res), dtype=np.int32)
    np.add.at(counts, (ds.labels, rows, cols), 1)

    row_prefix = np.zeros((ds.num_classes, res, res + 1), dtype=np.int32)
    np.cumsum(counts, axis=2, dtype=np.int32, out=row_prefix[:, :, 1:])
    occupancy = counts.sum(axis=0, dtype=np.int32)

    offsets = ids = labels = None
    if keep_buckets:
        lin = rows * res + cols
        ids = np.argsort(lin, kind="stable")
        offsets = np.zeros(res * res + 1, dtype=np.int64)
        np.cumsum(np.bincount(lin, minlength=res * res), out=offsets[1:])
        labels = _readonly(ds.labels.copy())
        ids = _readonly(ids)
        offsets = _readonly(offsets)

    return RasterGrid(
        config=cfg,
        num_classes=ds.num_classes,
        counts=_readonly(counts),
        row_prefix=_readonly(row_prefix),
        occupancy=_readonly(occupancy),
        total_points=len(ds),
        bucket_offsets=offsets,
        bucket_ids=ids,
        point_labels=labels,
    )


def bucket(grid: RasterGrid, pixel: PixelCoord) -> np.ndarray:
    """Point ids stored on `pixel`, in dataset order."""
    if not grid.has_buckets:
        raise ConfigurationError("grid was rasterized without buckets")
    lin = pixel.row * grid.resolution + pixel.col
    return grid.bucket_ids[grid.bucket_offsets[lin] : grid.bucket_offsets[lin + 1]]


def collision_count(grid: RasterGrid) -> int:
    """Number of pixels holding more than one point."""
    return int(np.count_nonzero(grid.occupancy > 1))


def collision_free(grid: RasterGrid) -> bool:
    return collision_count(grid) == 0


@dataclass(frozen=True)
class RasterStats:
    total_points: int
    occupied_pixels: int
    collision_pixels: int
    class_totals: Tuple[int, ...]

    @property
    def collision_fraction(self) -> float:
        if self.occupied_pixels == 0:
            return 0.0
        return self.collision_pixels / self.occupied_pixels


def raster_stats(grid: RasterGrid) -> RasterStats:
    return RasterStats(
        total_points=grid.total_points,
        occupied_pixels=int(np.count_nonzero(grid.occupancy)),
        collision_pixels=collision_count(grid),
        class_totals=tuple(int(c) for c in grid.counts.sum(axis=(1, 2))),
    )


# Distances between pixel centers are carried as integer keys: dx² + dy² for
# L2 and |dx| + |dy| for L1. Membership and ordering only ever compare keys.


def distance_keys(dx: np.ndarray, dy: np.ndarray, metric: Metric) -> np.ndarray:
    dx = np.asarray(dx, dtype=np.int64)
    dy = np.asarray(dy, dtype=np.int64)
    if metric == Metric.L1:
        return np.abs(dx) + np.abs(dy)
    return dx * dx + dy * dy


def radius_key(r: int, metric: Metric) -> int:
    return r if metric == Metric.L1 else r * r


def key_distance(key: int, metric: Metric) -> float:
    return float(key) if metric == Metric.L1 else float(np.sqrt(key))


def neighbor_order_key(distance_key: int, row: int, col: int, tiebreak: int) -> tuple:
    """
    Ordering shared by active search and the brute-force oracle.

    Neighbors sort by integer distance key, then by pixel in row-major order,
    then by `tiebreak`: the point id when ids are known, otherwise the class id.
    """
    return (distance_key, row, col, tiebreak)


# Rendering

PALETTE: Tuple[Tuple[int, int, int], ...] = (
    (228, 26, 28),
    (55, 126, 184),
    (77, 175, 74),
    (152, 78, 163),
    (255, 127, 0),
    (166, 86, 40),
    (247, 129, 191),
    (153, 153, 153),
)
BACKGROUND = (255, 255, 255)
OUTLINE_COLOR = (64, 64, 64)
MARK_COLOR = (0, 0, 0)
MARK_ARM = 4


def write_ppm(path: Union[str, Path], rgb: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 array as binary PPM (P6), maxval 255."""
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("rgb must be a uint8 array of shape (H, W, 3)")
    h, w = rgb.shape[:2]
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(rgb).tobytes())


def circle_outline(center: PixelCoord, r: int) -> np.ndarray:
    """Integer midpoint circle: outline pixels as an (M, 2) array of (col, row)."""
    cx, cy = center
    points = []
    x, y = 0, r
    switch = 3 - 2 * r
    while x <= y:
        for px, py in ((x, y), (y, x)):
            points.extend(
                [(cx + px, cy + py), (cx - px, cy + py), (cx + px, cy - py), (cx - px, cy - py)]
            )
        if switch < 0:
            switch += 4 * x + 6
        else:
            switch += 4 * (x - y) + 10
            y -= 1
        x += 1
    return np.unique(np.array(points, dtype=np.int64).reshape(-1, 2), axis=0)


def diamond_outline(center: PixelCoord, r: int) -> np.ndarray:
    """Pixels with |dx| + |dy| == r, as an (M, 2) array of (col, row)."""
    t = np.arange(r + 1, dtype=np.int64)
    s = r - t
    dx = np.concatenate([t, t, -t, -t])
    dy = np.concatenate([s, -s, s, -s])
    points = np.column_stack([center.col + dx, center.row + dy])
    return np.unique(points, axis=0)


def _plot(image: np.ndarray, points: np.ndarray, color: Sequence[int]) -> None:
    res = image.shape[0]
    inside = (
        (points[:, 0] >= 0) & (points[:, 0] < res) & (points[:, 1] >= 0) & (points[:, 1] < res)
    )
    points = points[inside]
    image[points[:, 1], points[:, 0]] = color


def render_image(
    grid: RasterGrid, overlay: Optional[Tuple[PixelCoord, Sequence[int]]] = None
) -> np.ndarray:
    """RGB image of the grid; a pixel takes the colour of its majority class."""
    res = grid.resolution
    image = np.empty((res, res, 3), dtype=np.uint8)
    image[:] = BACKGROUND
    occupied = grid.occupancy > 0
    if occupied.any():
        palette = np.array(PALETTE, dtype=np.uint8)
        majority = np.argmax(grid.counts, axis=0)
        image[occupied] = palette[majority[occupied] % len(PALETTE)]

    if overlay is not None:
        center, radii = overlay
        outline = diamond_outline if grid.config.metric == Metric.L1 else circle_outline
        for r in radii:
            _plot(image, outline(center, int(r)), OUTLINE_COLOR)
        arm = np.arange(-MARK_ARM, MARK_ARM + 1, dtype=np.int64)
        zeros = np.zeros_like(arm)
        mark = np.concatenate(
            [
                np.column_stack([center.col + arm, center.row + zeros]),
                np.column_stack([center.col + zeros, center.row + arm]),
            ]
        )
        _plot(image, mark, MARK_COLOR)
    return image


def render(
    grid: RasterGrid,
    path: Union[str, Path],
    overlay: Optional[Tuple[PixelCoord, Sequence[int]]] = None,
) -> None:
    """Write the grid as a P6 PPM, optionally with a query mark and radius outlines."""
    write_ppm(path, render_image(grid, overlay))
