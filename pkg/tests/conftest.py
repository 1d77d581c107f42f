from pathlib import Path
from typing import Iterable, Tuple

import numpy as np
import pytest

from actsearch.dataset import Dataset, LabeledPoint, WorldBounds
from actsearch.raster import GridConfig, Metric, rasterize

# Fifteen well separated points in one class.
SPARSE_POINTS = [
    (0.12, 0.80), (0.25, 0.55), (0.31, 0.91), (0.40, 0.22), (0.47, 0.64),
    (0.52, 0.40), (0.58, 0.86), (0.63, 0.12), (0.69, 0.51), (0.74, 0.73),
    (0.80, 0.30), (0.86, 0.92), (0.90, 0.60), (0.15, 0.35), (0.35, 0.05),
]


@pytest.fixture
def sparse_dataset() -> Dataset:
    return Dataset.from_points([LabeledPoint(x, y, 0) for x, y in SPARSE_POINTS], 1)


def pixel_dataset(
    pixels: Iterable[Tuple[int, int, int]], resolution: int, num_classes: int
) -> Tuple[Dataset, GridConfig]:
    """Points placed on the centers of the given (col, row, label) pixels."""
    points = [
        LabeledPoint(col + 0.5, resolution - 1 - row + 0.5, label)
        for col, row, label in pixels
    ]
    ds = Dataset.from_points(points, num_classes)
    cfg = GridConfig(resolution, WorldBounds(0, resolution, 0, resolution))
    return ds, cfg


def pixel_grid(pixels, resolution, num_classes=1, metric=Metric.L2, keep_buckets=False):
    ds, cfg = pixel_dataset(pixels, resolution, num_classes)
    cfg = GridConfig(cfg.resolution, cfg.bounds, metric)
    return rasterize(ds, cfg, keep_buckets=keep_buckets)


def read_ppm(path: Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    magic, size, maxval, body = raw.split(b"\n", 3)
    assert magic == b"P6"
    assert maxval == b"255"
    width, height = (int(v) for v in size.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)
