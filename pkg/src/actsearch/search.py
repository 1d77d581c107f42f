"""
Active search: k nearest neighbors on a RasterGrid by adapting a pixel radius.

Starting from `r0`, the circle around the query pixel is rescanned and its
radius rescaled with r' = round(r * sqrt(k / n)) until it encloses exactly k
points. An empty circle doubles the radius. When the update stalls or
revisits a radius, the search bisects the bracket [lo, hi] with
count(lo) < k <= count(hi) until hi = lo + 1, then keeps the k hits that come
first under `raster.neighbor_order_key`.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from actsearch.errors import ConfigurationError, QueryError
from actsearch.raster import (
    Metric,
    PixelCoord,
    RasterGrid,
    bucket,
    distance_keys,
    key_distance,
    neighbor_order_key,
    pixel_of,
    radius_key,
)

DEFAULT_K = 11
DEFAULT_R0 = 100
DEFAULT_MAX_ITERS = 64


class Termination(str, Enum):
    EXACT_K = "exact_k"
    BRACKETED = "bracketed"
    ITERATION_CAP = "iteration_cap"


@dataclass(frozen=True)
class SearchParams:
    k: int = DEFAULT_K
    r0: int = DEFAULT_R0
    max_iters: int = DEFAULT_MAX_ITERS
    metric: Metric = Metric.L2

    def __post_init__(self):
        for name in ("k", "r0", "max_iters"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {getattr(self, name)}")
        object.__setattr__(self, "metric", Metric(self.metric))


class TraceStep(NamedTuple):
    radius: int
    count: int


@dataclass(frozen=True)
class SearchTrace:
    steps: Tuple[TraceStep, ...]
    terminated_by: Termination
    final_radius: int

    @property
    def radii(self) -> List[int]:
        return [step.radius for step in self.steps]


class PixelHit(NamedTuple):
    pixel: PixelCoord
    label: int
    count: int
    distance_key: int
    distance: float
    point_ids: Optional[Tuple[int, ...]]


class Neighbor(NamedTuple):
    pixel: PixelCoord
    label: int
    distance: float
    count: int
    point_ids: Optional[Tuple[int, ...]]


@dataclass(frozen=True)
class QueryResult:
    query_pixel: PixelCoord
    neighbors: Tuple[Neighbor, ...]
    predicted_class: int
    trace: SearchTrace
    votes: Tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return sum(n.count for n in self.neighbors)

    @property
    def point_ids(self) -> Optional[List[int]]:
        if any(n.point_ids is None for n in self.neighbors):
            return None
        return [i for n in self.neighbors for i in n.point_ids]


def update_radius(r_t: int, n_t: int, k: int) -> int:
    """
    round(r_t * sqrt(k / n_t)), rounding half away from zero, floored at 1.

    Evaluated exactly: with y = sqrt(4 r² k / n), round(y / 2) = (floor(y) + 1) // 2
    and floor(y) = isqrt(floor(4 r² k / n)).
    """
    if r_t < 1 or n_t < 1 or k < 1:
        raise ValueError(f"update_radius needs positive arguments, got ({r_t}, {n_t}, {k})")
    y = math.isqrt(4 * r_t * r_t * k // n_t)
    return max(1, (y + 1) // 2)


def _isqrt(values: np.ndarray) -> np.ndarray:
    root = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    root -= (root * root > values).astype(np.int64)
    root += ((root + 1) * (root + 1) <= values).astype(np.int64)
    return root


def _check_center(grid: RasterGrid, center: PixelCoord, r: int) -> None:
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if not grid.contains(center):
        raise QueryError(f"pixel {tuple(center)} outside a {grid.resolution}px grid")


def count_in_circle(
    grid: RasterGrid, center: PixelCoord, r: int, metric: Optional[Metric] = None
) -> np.ndarray:
    """
    Per-class number of points on pixels within distance r of `center`.

    Every row of the circle is one contiguous span of pixels, counted from the
    per-row prefix sums of the grid.
    """
    metric = Metric(metric or grid.config.metric)
    _check_center(grid, center, r)
    res = grid.resolution
    cx, cy = center
    dy = np.arange(max(-r, -cy), min(r, res - 1 - cy) + 1, dtype=np.int64)
    if metric == Metric.L1:
        half = r - np.abs(dy)
    else:
        half = _isqrt(r * r - dy * dy)
    rows = cy + dy
    lo = np.maximum(cx - half, 0)
    hi = np.minimum(cx + half, res - 1)
    spans = grid.row_prefix[:, rows, hi + 1] - grid.row_prefix[:, rows, lo]
    return spans.sum(axis=1, dtype=np.int64)


def collect_in_circle(
    grid: RasterGrid, center: PixelCoord, r: int, metric: Optional[Metric] = None
) -> List[PixelHit]:
    """
    Occupied pixels within distance r of `center`, one hit per (pixel, class).

    Hits are sorted by distance, then pixel row-major, then class id. When the
    grid keeps buckets each hit carries the ids of its points.
    """
    metric = Metric(metric or grid.config.metric)
    _check_center(grid, center, r)
    res = grid.resolution
    cx, cy = center
    row_lo, row_hi = max(cy - r, 0), min(cy + r, res - 1)
    col_lo, col_hi = max(cx - r, 0), min(cx + r, res - 1)
    window = grid.occupancy[row_lo : row_hi + 1, col_lo : col_hi + 1]
    wr, wc = np.nonzero(window)
    rows = wr.astype(np.int64) + row_lo
    cols = wc.astype(np.int64) + col_lo
    keys = distance_keys(cols - cx, rows - cy, metric)
    inside = keys <= radius_key(r, metric)
    rows, cols, keys = rows[inside], cols[inside], keys[inside]
    per_class = grid.counts[:, rows, cols]

    hits = []
    for j in range(len(keys)):
        pixel = PixelCoord(int(cols[j]), int(rows[j]))
        key = int(keys[j])
        ids = bucket(grid, pixel) if grid.has_buckets else None
        for label in range(grid.num_classes):
            count = int(per_class[label, j])
            if count == 0:
                continue
            point_ids = None
            if ids is not None:
                point_ids = tuple(int(i) for i in ids if grid.point_labels[i] == label)
            hits.append(
                PixelHit(pixel, label, count, key, key_distance(key, metric), point_ids)
            )
    hits.sort(key=lambda h: neighbor_order_key(h.distance_key, h.pixel.row, h.pixel.col, h.label))
    return hits


def _truncate(grid: RasterGrid, hits: Sequence[PixelHit], k: int) -> List[Neighbor]:
    """First k points of the sorted hit list; a shared pixel is split in id order."""
    neighbors: List[Neighbor] = []
    remaining = k
    i = 0
    while i < len(hits) and remaining > 0:
        j = i
        while j < len(hits) and hits[j].pixel == hits[i].pixel:
            j += 1
        group = hits[i:j]
        total = sum(h.count for h in group)
        if total <= remaining:
            neighbors.extend(
                Neighbor(h.pixel, h.label, h.distance, h.count, h.point_ids) for h in group
            )
            remaining -= total
        elif grid.has_buckets:
            chosen = bucket(grid, group[0].pixel)[:remaining]
            for h in group:
                ids = tuple(int(p) for p in chosen if grid.point_labels[p] == h.label)
                if ids:
                    neighbors.append(Neighbor(h.pixel, h.label, h.distance, len(ids), ids))
            remaining = 0
        else:
            for h in group:
                take = min(h.count, remaining)
                if take:
                    neighbors.append(Neighbor(h.pixel, h.label, h.distance, take, None))
                remaining -= take
        i = j
    return neighbors


def _votes(neighbors: Sequence[Neighbor], num_classes: int) -> Tuple[int, ...]:
    votes = np.zeros(num_classes, dtype=np.int64)
    for n in neighbors:
        votes[n.label] += n.count
    return tuple(int(v) for v in votes)


def active_knn(
    grid: RasterGrid, query: Tuple[float, float], params: SearchParams
) -> QueryResult:
    x, y = float(query[0]), float(query[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise QueryError(f"query ({x}, {y}) is not finite")
    k, metric = params.k, params.metric
    if k > grid.total_points:
        raise QueryError(
            f"k={k} exceeds the number of indexed points N={grid.total_points}"
        )

    center = pixel_of(grid.config, x, y)
    # A circle of this radius covers the whole grid from any center.
    cap = 2 * grid.resolution
    lo, hi = -1, None
    r = min(params.r0, cap)
    steps: List[TraceStep] = []
    visited = set()
    bisecting = False
    final: Optional[Tuple[int, Termination]] = None

    for _ in range(params.max_iters):
        n = int(count_in_circle(grid, center, r, metric).sum())
        steps.append(TraceStep(r, n))
        if n == k:
            final = (r, Termination.EXACT_K)
            break
        if n < k:
            lo = max(lo, r)
        else:
            hi = r if hi is None else min(hi, r)
        visited.add(r)
        if hi is not None and hi - lo == 1:
            final = (hi, Termination.BRACKETED)
            break

        if not bisecting:
            proposal = min(2 * r if n == 0 else update_radius(r, n, k), cap)
            if (
                proposal == r
                or proposal in visited
                or proposal <= lo
                or (hi is not None and proposal >= hi)
            ):
                bisecting = True
            else:
                r = proposal
        if bisecting:
            r = (lo + hi) // 2 if hi is not None else min(2 * max(r, 1), cap)

    if final is None:
        final = (hi if hi is not None else cap, Termination.ITERATION_CAP)

    radius, termination = final
    hits = collect_in_circle(grid, center, radius, metric)
    neighbors = _truncate(grid, hits, k)
    votes = _votes(neighbors, grid.num_classes)
    return QueryResult(
        query_pixel=center,
        neighbors=tuple(neighbors),
        predicted_class=int(np.argmax(votes)),
        trace=SearchTrace(tuple(steps), termination, radius),
        votes=votes,
    )


def classify(
    grid: RasterGrid, query: Tuple[float, float], params: SearchParams
) -> Tuple[int, QueryResult]:
    """Majority vote over the k neighbors; ties go to the lowest class id."""
    result = active_knn(grid, query, params)
    return result.predicted_class, result


def classify_many(
    grid: RasterGrid, queries: np.ndarray, params: SearchParams
) -> np.ndarray:
    return np.array(
        [classify(grid, (q[0], q[1]), params)[0] for q in np.asarray(queries)],
        dtype=np.int64,
    )
