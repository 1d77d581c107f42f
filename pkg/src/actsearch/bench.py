"""
Benchmark harness: query time versus N for brute force and active search,
classification agreement, and the resolution trade-off sweep.

Timings use the monotonic `time.perf_counter_ns` clock, run single-threaded,
and report the minimum over `repeats` runs.
"""

import csv
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from actsearch import dataset as ds_mod
from actsearch.errors import ConfigurationError
from actsearch.oracle import OracleMode, Space, agreement, brute_classify_many
from actsearch.raster import Metric, grid_config, raster_stats, rasterize
from actsearch.search import DEFAULT_K, DEFAULT_MAX_ITERS, DEFAULT_R0, SearchParams, classify_many

DEFAULT_N_VALUES = (1_000, 5_000, 10_000, 50_000, 100_000, 500_000, 1_000_000)
DEFAULT_RESOLUTIONS = (250, 500, 1000, 2000, 3000)
BENCH_HEADER = ["n", "method", "build_ms", "query_total_ms", "query_mean_us", "agreement"]
PREDICTIONS_HEADER = ["n", "query", "x", "y", "brute", "active"]
TRADEOFF_HEADER = [
    "resolution",
    "n",
    "build_ms",
    "query_mean_us",
    "collision_fraction",
    "agreement_world",
    "agreement_pixel",
]

# Independent random streams derived from (seed, n).
DATA_STREAM = 0
QUERY_STREAM = 1

T = TypeVar("T")


class Method(str, Enum):
    BRUTE_FORCE = "BruteForce"
    ACTIVE_SEARCH = "ActiveSearch"


@dataclass(frozen=True)
class BenchConfig:
    n_values: Tuple[int, ...] = DEFAULT_N_VALUES
    num_classes: int = 3
    k: int = DEFAULT_K
    r0: int = DEFAULT_R0
    resolution: int = 3000
    metric: Metric = Metric.L2
    num_queries: int = 100
    seed: int = 42
    repeats: int = 3
    max_iters: int = DEFAULT_MAX_ITERS
    margin_fraction: float = ds_mod.DEFAULT_MARGIN_FRACTION

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "metric", Metric(self.metric))
        if not self.n_values:
            raise ConfigurationError("n_values must not be empty")
        if list(self.n_values) != sorted(self.n_values):
            raise ConfigurationError(f"n_values must be ascending, got {list(self.n_values)}")
        if self.n_values[0] < self.k:
            raise ConfigurationError(
                f"every n must be >= k={self.k}, got n={self.n_values[0]}"
            )
        for name in ("num_classes", "num_queries", "repeats", "resolution"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {getattr(self, name)}")

    @property
    def search_params(self) -> SearchParams:
        return SearchParams(k=self.k, r0=self.r0, max_iters=self.max_iters, metric=self.metric)


@dataclass(frozen=True)
class BenchRow:
    n: int
    method: Method
    build_ms: float
    query_total_ms: float
    query_mean_us: float
    agreement_vs_brute: Optional[float] = None


class PredictionRecord(NamedTuple):
    n: int
    query: int
    x: float
    y: float
    brute: int
    active: int


@dataclass
class BenchResult:
    rows: List[BenchRow] = field(default_factory=list)
    predictions: List[PredictionRecord] = field(default_factory=list)


def derive_seed(seed: int, n: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, n, stream]).generate_state(1)[0])


def _elapsed_ms(fn: Callable[[], T]) -> Tuple[float, T]:
    start = time.perf_counter_ns()
    result = fn()
    return (time.perf_counter_ns() - start) / 1e6, result


def _min_of_repeats(fn: Callable[[], T], repeats: int) -> Tuple[float, T]:
    best, result = _elapsed_ms(fn)
    for _ in range(repeats - 1):
        elapsed, result = _elapsed_ms(fn)
        best = min(best, elapsed)
    return best, result


def run_bench(
    cfg: BenchConfig,
    on_row: Optional[Callable[[BenchRow], None]] = None,
) -> BenchResult:
    """
    For every n: generate data, build the grid once, classify held-out queries
    with both methods and score active search against World brute force.
    """
    result = BenchResult()
    params = cfg.search_params
    oracle_mode = OracleMode(Space.WORLD, cfg.metric)

    for n in cfg.n_values:
        data = ds_mod.generate(n, cfg.num_classes, derive_seed(cfg.seed, n, DATA_STREAM))
        queries = ds_mod.make_queries(data, cfg.num_queries, derive_seed(cfg.seed, n, QUERY_STREAM))
        gcfg = grid_config(data, cfg.resolution, cfg.metric, cfg.margin_fraction)

        build_ms, grid = _elapsed_ms(lambda: rasterize(data, gcfg))  # noqa: B023
        brute_ms, brute = _min_of_repeats(
            lambda: brute_classify_many(data, queries, cfg.k, oracle_mode), cfg.repeats  # noqa: B023
        )
        active_ms, active = _min_of_repeats(
            lambda: classify_many(grid, queries, params), cfg.repeats  # noqa: B023
        )
        del grid

        rows = [
            BenchRow(n, Method.BRUTE_FORCE, 0.0, brute_ms, brute_ms * 1000 / cfg.num_queries),
            BenchRow(
                n,
                Method.ACTIVE_SEARCH,
                build_ms,
                active_ms,
                active_ms * 1000 / cfg.num_queries,
                agreement(active, brute),
            ),
        ]
        for row in rows:
            result.rows.append(row)
            if on_row is not None:
                on_row(row)
        result.predictions.extend(
            PredictionRecord(n, i, float(q[0]), float(q[1]), int(b), int(a))
            for i, (q, b, a) in enumerate(zip(queries, brute, active))
        )
    return result


def _fmt(value: Optional[float], digits: int) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def write_rows_csv(rows: Sequence[BenchRow], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(BENCH_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.n,
                    row.method.value,
                    _fmt(row.build_ms, 3),
                    _fmt(row.query_total_ms, 3),
                    _fmt(row.query_mean_us, 3),
                    _fmt(row.agreement_vs_brute, 6),
                ]
            )


def write_predictions_csv(
    predictions: Sequence[PredictionRecord], path: Union[str, Path]
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        for p in predictions:
            writer.writerow([p.n, p.query, format(p.x, ".17g"), format(p.y, ".17g"), p.brute, p.active])


def agreement_from_predictions(path: Union[str, Path]) -> dict:
    """Recompute the per-n agreement from a predictions CSV."""
    brute: dict = {}
    active: dict = {}
    with open(path, encoding="utf-8", newline="") as f:
        for record in csv.DictReader(f):
            n = int(record["n"])
            brute.setdefault(n, []).append(int(record["brute"]))
            active.setdefault(n, []).append(int(record["active"]))
    return {n: agreement(active[n], brute[n]) for n in brute}


@dataclass(frozen=True)
class TradeoffConfig:
    resolutions: Tuple[int, ...] = DEFAULT_RESOLUTIONS
    n: int = 10_000
    num_classes: int = 3
    k: int = DEFAULT_K
    r0: int = DEFAULT_R0
    metric: Metric = Metric.L2
    num_queries: int = 100
    seed: int = 42
    max_iters: int = DEFAULT_MAX_ITERS
    margin_fraction: float = ds_mod.DEFAULT_MARGIN_FRACTION

    def __post_init__(self):
        object.__setattr__(self, "resolutions", tuple(int(r) for r in self.resolutions))
        object.__setattr__(self, "metric", Metric(self.metric))
        if not self.resolutions or min(self.resolutions) < 1:
            raise ConfigurationError(f"resolutions must be positive, got {list(self.resolutions)}")
        if self.n < self.k:
            raise ConfigurationError(f"n={self.n} must be >= k={self.k}")
        if self.num_queries < 1:
            raise ConfigurationError(f"num_queries must be >= 1, got {self.num_queries}")


@dataclass(frozen=True)
class TradeoffRow:
    resolution: int
    n: int
    build_ms: float
    query_mean_us: float
    collision_fraction: float
    agreement_world: float
    agreement_pixel: float


def run_tradeoff(
    cfg: TradeoffConfig,
    on_row: Optional[Callable[[TradeoffRow], None]] = None,
) -> List[TradeoffRow]:
    """
    Accuracy and cost of active search as the image resolution varies.

    A coarse image merges nearby points into one pixel and loses accuracy
    against World brute force; a fine image has more pixels to scan.
    """
    data = ds_mod.generate(cfg.n, cfg.num_classes, derive_seed(cfg.seed, cfg.n, DATA_STREAM))
    queries = ds_mod.make_queries(data, cfg.num_queries, derive_seed(cfg.seed, cfg.n, QUERY_STREAM))
    params = SearchParams(k=cfg.k, r0=cfg.r0, max_iters=cfg.max_iters, metric=cfg.metric)
    world = brute_classify_many(data, queries, cfg.k, OracleMode(Space.WORLD, cfg.metric))

    rows = []
    for resolution in cfg.resolutions:
        gcfg = grid_config(data, resolution, cfg.metric, cfg.margin_fraction)
        build_ms, grid = _elapsed_ms(lambda: rasterize(data, gcfg))  # noqa: B023
        query_ms, active = _elapsed_ms(lambda: classify_many(grid, queries, params))  # noqa: B023
        pixel = brute_classify_many(
            data, queries, cfg.k, OracleMode(Space.PIXEL, cfg.metric), gcfg
        )
        row = TradeoffRow(
            resolution=resolution,
            n=cfg.n,
            build_ms=build_ms,
            query_mean_us=query_ms * 1000 / cfg.num_queries,
            collision_fraction=raster_stats(grid).collision_fraction,
            agreement_world=agreement(active, world),
            agreement_pixel=agreement(active, pixel),
        )
        del grid
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return rows


def write_tradeoff_csv(rows: Sequence[TradeoffRow], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRADEOFF_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.resolution,
                    row.n,
                    f"{row.build_ms:.3f}",
                    f"{row.query_mean_us:.3f}",
                    f"{row.collision_fraction:.6f}",
                    f"{row.agreement_world:.6f}",
                    f"{row.agreement_pixel:.6f}",
                ]
            )
