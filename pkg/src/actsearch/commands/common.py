"""Option resolution, dataset loading and error handling shared by the commands."""

from functools import wraps
from pathlib import Path
from typing import Any, Optional

import typer
from rich import print

from actsearch import dataset
from actsearch.errors import ActiveSearchError
from actsearch.raster import Metric, grid_config, rasterize
from actsearch.search import SearchParams
from actsearch.utils import get_setting


def command_handler(func):
    """Decorator to report library and I/O failures as runtime errors (exit 1)."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ActiveSearchError, OSError) as e:
            print(f"[red]Error: {e}[/red]")
            raise typer.Exit(1) from e

    return wrapper


def pick(value: Any, section: str, key: str, fallback: Any) -> Any:
    """A flag value if given, else variables.yaml, else the library default."""
    return value if value is not None else get_setting(section, key, fallback)


def load_dataset(
    data: Optional[Path], n: Optional[int], classes: Optional[int], seed: Optional[int]
) -> dataset.Dataset:
    """Load `data` when given, otherwise generate from the dataset defaults."""
    if data is not None:
        return dataset.load(data, classes)
    return dataset.generate(
        pick(n, "dataset", "n", 1000),
        pick(classes, "dataset", "classes", 3),
        pick(seed, "dataset", "seed", 42),
    )


def resolve_metric(metric: Optional[Metric]) -> Metric:
    return Metric(pick(metric, "grid", "metric", Metric.L2.value))


def search_params(
    k: Optional[int], r0: Optional[int], max_iters: Optional[int], metric: Metric, n: int
) -> SearchParams:
    k = pick(k, "search", "k", 11)
    if k > n:
        raise typer.BadParameter(f"k={k} exceeds the number of points N={n}", param_hint="--k")
    return SearchParams(
        k=k,
        r0=pick(r0, "search", "r0", 100),
        max_iters=pick(max_iters, "search", "max_iters", 64),
        metric=metric,
    )


def query_point(ds: dataset.Dataset, x: Optional[float], y: Optional[float]):
    """The requested query, defaulting each missing coordinate to the hull center."""
    bounds = dataset.compute_bounds(ds, 0.0)
    return (
        x if x is not None else (bounds.xmin + bounds.xmax) / 2,
        y if y is not None else (bounds.ymin + bounds.ymax) / 2,
    )


def build_grid(ds: dataset.Dataset, resolution: Optional[int], metric: Metric, buckets: bool):
    cfg = grid_config(
        ds,
        pick(resolution, "grid", "resolution", 3000),
        metric,
        get_setting("dataset", "margin_fraction", dataset.DEFAULT_MARGIN_FRACTION),
    )
    return rasterize(ds, cfg, keep_buckets=buckets)


# Option factories keep flag names and help texts identical across commands.


def data_option():
    return typer.Option(None, "--data", "-d", help="Dataset CSV (x,y,label); generated when omitted", exists=True, dir_okay=False)


def n_option(help: str = "Number of points to generate"):
    return typer.Option(None, "--n", min=1, help=help)


def classes_option():
    return typer.Option(None, "--classes", min=1, help="Number of classes")


def seed_option():
    return typer.Option(None, "--seed", help="Random seed")


def resolution_option():
    return typer.Option(None, "--resolution", min=1, help="Pixels per side of the image")


def metric_option():
    return typer.Option(None, "--metric", case_sensitive=False, help="Distance metric")


def k_option():
    return typer.Option(None, "--k", min=1, help="Number of neighbors")


def r0_option():
    return typer.Option(None, "--r0", min=1, help="Initial search radius in pixels")


def max_iters_option():
    return typer.Option(None, "--max-iters", min=1, help="Iteration cap of the search")


def x_option():
    return typer.Option(None, "--x", help="Query x (world units); hull center when omitted")


def y_option():
    return typer.Option(None, "--y", help="Query y (world units); hull center when omitted")
