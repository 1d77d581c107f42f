"""Labeled 2-D point sets: synthetic generation, bounds and CSV I/O."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Union

import numpy as np

from actsearch.errors import DatasetError, DatasetFormatError

CSV_HEADER = ["x", "y", "label"]
DEFAULT_MARGIN_FRACTION = 0.05
# Extent given to an axis on which every point has the same coordinate.
DEGENERATE_EXTENT = 1.0


@dataclass(frozen=True)
class LabeledPoint:
    x: float
    y: float
    label: int

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DatasetError(f"non-finite coordinates ({self.x}, {self.y})")
        if self.label < 0:
            raise DatasetError(f"negative label {self.label}")


@dataclass(frozen=True)
class WorldBounds:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        extents = (self.xmax - self.xmin, self.ymax - self.ymin)
        if not all(math.isfinite(e) for e in extents):
            raise DatasetError(
                f"bounds x=[{self.xmin}, {self.xmax}] y=[{self.ymin}, {self.ymax}] "
                "are too wide to map onto pixels"
            )
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise DatasetError(
                f"empty bounds x=[{self.xmin}, {self.xmax}] y=[{self.ymin}, {self.ymax}]"
            )

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    An ordered, immutable set of labeled points.

    Points are stored column-wise; the position of a point in the columns is
    its identity everywhere downstream (buckets, oracle results).
    """

    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        xs = _frozen(np.array(self.xs, dtype=np.float64, copy=True).reshape(-1))
        ys = _frozen(np.array(self.ys, dtype=np.float64, copy=True).reshape(-1))
        labels = _frozen(np.array(self.labels, dtype=np.int64, copy=True).reshape(-1))
        if not (len(xs) == len(ys) == len(labels)):
            raise DatasetError("x, y and label columns differ in length")
        if self.num_classes < 1:
            raise DatasetError(f"num_classes must be positive, got {self.num_classes}")
        if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            bad = int(np.flatnonzero(~(np.isfinite(xs) & np.isfinite(ys)))[0])
            raise DatasetError(f"point {bad} has non-finite coordinates")
        if len(labels) and (labels.min() < 0 or labels.max() >= self.num_classes):
            bad = int(np.flatnonzero((labels < 0) | (labels >= self.num_classes))[0])
            raise DatasetError(
                f"point {bad} has label {labels[bad]} outside [0, {self.num_classes})"
            )
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_points(cls, points: Iterable[LabeledPoint], num_classes: int) -> "Dataset":
        points = list(points)
        return cls(
            xs=np.array([p.x for p in points], dtype=np.float64),
            ys=np.array([p.y for p in points], dtype=np.float64),
            labels=np.array([p.label for p in points], dtype=np.int64),
            num_classes=num_classes,
        )

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, index: int) -> LabeledPoint:
        return LabeledPoint(
            float(self.xs[index]), float(self.ys[index]), int(self.labels[index])
        )

    def __iter__(self) -> Iterator[LabeledPoint]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
            and np.array_equal(self.labels, other.labels)
        )

    @property
    def points(self) -> List[LabeledPoint]:
        return list(self)


def generate(n: int, num_classes: int, seed: int) -> Dataset:
    """
    Draw `n` points uniformly in the unit square with uniformly drawn labels.

    The generator is numpy's PCG64 seeded with `seed`; x, y and the labels are
    drawn in that order, so the output is a pure function of the arguments.
    """
    if n < 1:
        raise DatasetError(f"n must be positive, got {n}")
    if num_classes < 1:
        raise DatasetError(f"num_classes must be positive, got {num_classes}")
    rng = np.random.default_rng(seed)
    xs = rng.random(n)
    ys = rng.random(n)
    labels = rng.integers(0, num_classes, size=n)
    return Dataset(xs=xs, ys=ys, labels=labels, num_classes=num_classes)


def _expand(lo: float, hi: float, margin_fraction: float) -> tuple[float, float]:
    extent = hi - lo
    if extent <= 0:
        # A few ULPs wide at least, so the two edges stay distinct floats.
        half = max(DEGENERATE_EXTENT, 4 * float(np.spacing(abs(lo)))) / 2
        lo, hi = lo - half, hi + half
    else:
        pad = extent * margin_fraction
        lo, hi = lo - pad, hi + pad
    if not math.isfinite(hi - lo):
        raise DatasetError(f"coordinate range [{lo}, {hi}] is too wide to map onto pixels")
    return lo, hi


def compute_bounds(
    ds: Dataset, margin_fraction: float = DEFAULT_MARGIN_FRACTION
) -> WorldBounds:
    """Axis-aligned hull of the points, padded by `margin_fraction` of each extent."""
    if len(ds) == 0:
        raise DatasetError("cannot compute bounds of an empty dataset")
    if margin_fraction < 0:
        raise DatasetError(f"margin_fraction must be >= 0, got {margin_fraction}")
    xmin, xmax = _expand(float(ds.xs.min()), float(ds.xs.max()), margin_fraction)
    ymin, ymax = _expand(float(ds.ys.min()), float(ds.ys.max()), margin_fraction)
    return WorldBounds(xmin, xmax, ymin, ymax)


def make_queries(ds: Dataset, count: int, seed: int) -> np.ndarray:
    """Held-out query points, uniform inside the data hull, shape (count, 2)."""
    if len(ds) == 0:
        raise DatasetError("cannot draw queries for an empty dataset")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(ds.xs.min(), ds.xs.max(), size=count)
    ys = rng.uniform(ds.ys.min(), ds.ys.max(), size=count)
    return np.column_stack([xs, ys])


def save(ds: Dataset, path: Union[str, Path]) -> None:
    """Write `x,y,label` CSV; coordinates keep 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for x, y, label in zip(ds.xs.tolist(), ds.ys.tolist(), ds.labels.tolist()):
            writer.writerow([format(x, ".17g"), format(y, ".17g"), label])


def _parse_row(row: List[str], path: Path, line: int) -> tuple[float, float, int]:
    if len(row) != 3:
        raise DatasetFormatError(f"expected 3 fields, got {len(row)}", path, line)
    try:
        x, y = float(row[0]), float(row[1])
        label = int(row[2])
    except ValueError:
        raise DatasetFormatError(f"malformed row {','.join(row)!r}", path, line) from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DatasetFormatError(f"non-finite coordinate in {','.join(row)!r}", path, line)
    if label < 0:
        raise DatasetFormatError(f"label {label} is negative", path, line)
    return x, y, label


def load(path: Union[str, Path], num_classes: Optional[int] = None) -> Dataset:
    """
    Read a dataset written by `save`.

    Args:
        path: CSV file with the header `x,y,label`
        num_classes: declared class count; inferred as max label + 1 when None
    """
    path = Path(path)
    xs: List[float] = []
    ys: List[float] = []
    labels: List[int] = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise DatasetFormatError("header must be exactly 'x,y,label'", path, 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            x, y, label = _parse_row(row, path, line)
            if num_classes is not None and label >= num_classes:
                raise DatasetFormatError(
                    f"label {label} outside [0, {num_classes})", path, line
                )
            xs.append(x)
            ys.append(y)
            labels.append(label)
    if not labels:
        raise DatasetFormatError("no data rows", path)
    classes = num_classes if num_classes is not None else max(labels) + 1
    return Dataset(xs=xs, ys=ys, labels=labels, num_classes=classes)
