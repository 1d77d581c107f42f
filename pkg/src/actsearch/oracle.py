"""
Brute-force kNN ground truth.

World mode measures distances between the raw coordinates; PixelQuantized mode
measures them between the pixel centers the points rasterize to, which makes
its output directly comparable with active search on a collision-free grid.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from actsearch.dataset import Dataset
from actsearch.errors import ConfigurationError, QueryError
from actsearch.raster import (
    GridConfig,
    Metric,
    distance_keys,
    key_distance,
    neighbor_order_key,
    pixel_of,
    pixels_of,
)


class Space(str, Enum):
    WORLD = "world"
    PIXEL = "pixel"


@dataclass(frozen=True)
class OracleMode:
    space: Space = Space.WORLD
    metric: Metric = Metric.L2

    def __post_init__(self):
        object.__setattr__(self, "space", Space(self.space))
        object.__setattr__(self, "metric", Metric(self.metric))


class OracleNeighbor(NamedTuple):
    index: int
    distance: float
    label: int


def _world_distances(ds: Dataset, query: Tuple[float, float], metric: Metric) -> np.ndarray:
    dx = ds.xs - query[0]
    dy = ds.ys - query[1]
    if metric == Metric.L1:
        dist = np.abs(dx) + np.abs(dy)
    else:
        dist = np.hypot(dx, dy)
    return dist


def _pixel_ranked(
    ds: Dataset, query: Tuple[float, float], k: int, metric: Metric, cfg: GridConfig
) -> Tuple[np.ndarray, np.ndarray]:
    cols, rows = pixels_of(cfg, ds.xs, ds.ys)
    center = pixel_of(cfg, query[0], query[1])
    keys = distance_keys(cols - center.col, rows - center.row, metric)
    kth = np.partition(keys, k - 1)[k - 1]
    candidates = np.flatnonzero(keys <= kth).tolist()
    candidates.sort(
        key=lambda i: neighbor_order_key(int(keys[i]), int(rows[i]), int(cols[i]), i)
    )
    return np.array(candidates[:k], dtype=np.int64), keys


def brute_knn(
    ds: Dataset,
    query: Tuple[float, float],
    k: int,
    mode: OracleMode = OracleMode(),
    cfg: Optional[GridConfig] = None,
) -> List[OracleNeighbor]:
    """
    The k points closest to `query`, compared against every point.

    Ties are broken by pixel row-major order (PixelQuantized only) and then by
    point index. `cfg` is the grid configuration used for PixelQuantized mode.
    """
    n = len(ds)
    if k < 1:
        raise QueryError(f"k must be >= 1, got {k}")
    if k > n:
        raise QueryError(f"k={k} exceeds the number of points N={n}")
    if mode.space == Space.PIXEL:
        if cfg is None:
            raise ConfigurationError("PixelQuantized mode needs the grid configuration")
        chosen, keys = _pixel_ranked(ds, query, k, mode.metric, cfg)
        distances = [key_distance(int(keys[i]), mode.metric) for i in chosen]
    else:
        dist = _world_distances(ds, query, mode.metric)
        kth = np.partition(dist, k - 1)[k - 1]
        candidates = np.flatnonzero(dist <= kth)
        # stable sort keeps point index order among equal distances
        chosen = candidates[np.argsort(dist[candidates], kind="stable")[:k]]
        distances = dist[chosen]
    return [
        OracleNeighbor(int(i), float(d), int(ds.labels[i]))
        for i, d in zip(chosen, distances)
    ]


def vote(labels: Sequence[int], num_classes: int) -> int:
    """Majority label; ties go to the lowest class id."""
    return int(np.argmax(np.bincount(np.asarray(labels, dtype=np.int64), minlength=num_classes)))


def brute_classify(
    ds: Dataset,
    query: Tuple[float, float],
    k: int,
    mode: OracleMode = OracleMode(),
    cfg: Optional[GridConfig] = None,
) -> int:
    neighbors = brute_knn(ds, query, k, mode, cfg)
    return vote([nb.label for nb in neighbors], ds.num_classes)


def brute_classify_many(
    ds: Dataset,
    queries: np.ndarray,
    k: int,
    mode: OracleMode = OracleMode(),
    cfg: Optional[GridConfig] = None,
) -> np.ndarray:
    return np.array(
        [brute_classify(ds, (q[0], q[1]), k, mode, cfg) for q in np.asarray(queries)],
        dtype=np.int64,
    )


def agreement(predictions_a: Sequence[int], predictions_b: Sequence[int]) -> float:
    """Fraction of positions where the two label sequences agree."""
    a = np.asarray(predictions_a)
    b = np.asarray(predictions_b)
    if a.shape != b.shape:
        raise QueryError(f"prediction lists differ in length ({len(a)} vs {len(b)})")
    if a.size == 0:
        raise QueryError("cannot score agreement of empty prediction lists")
    return float(np.count_nonzero(a == b)) / a.size
