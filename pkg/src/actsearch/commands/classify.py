# typer cmd : actsearch classify
from pathlib import Path
from typing import Optional

from rich import print

from actsearch.commands.common import (
    build_grid,
    classes_option,
    command_handler,
    data_option,
    k_option,
    load_dataset,
    max_iters_option,
    metric_option,
    n_option,
    query_point,
    r0_option,
    resolution_option,
    resolve_metric,
    search_params,
    seed_option,
    x_option,
    y_option,
)
from actsearch.oracle import OracleMode, Space, brute_classify
from actsearch.raster import Metric
from actsearch.search import classify


@command_handler
def classify_command(
    data: Optional[Path] = data_option(),
    n: Optional[int] = n_option(),
    classes: Optional[int] = classes_option(),
    seed: Optional[int] = seed_option(),
    x: Optional[float] = x_option(),
    y: Optional[float] = y_option(),
    k: Optional[int] = k_option(),
    r0: Optional[int] = r0_option(),
    max_iters: Optional[int] = max_iters_option(),
    resolution: Optional[int] = resolution_option(),
    metric: Optional[Metric] = metric_option(),
):
    """Classify (x, y) with active search and compare with brute-force kNN."""
    ds = load_dataset(data, n, classes, seed)
    metric = resolve_metric(metric)
    params = search_params(k, r0, max_iters, metric, len(ds))
    grid = build_grid(ds, resolution, metric, buckets=False)
    query = query_point(ds, x, y)

    label, result = classify(grid, query, params)
    brute = brute_classify(ds, query, params.k, OracleMode(Space.WORLD, metric))

    votes = ", ".join(f"{c}: {v}" for c, v in enumerate(result.votes))
    print(f"[blue]Query ({query[0]:.6g}, {query[1]:.6g}) -> pixel {tuple(result.query_pixel)}[/blue]")
    print(f"Votes: {votes}")
    print(f"[green]Active search: class {label}[/green]")
    color = "green" if brute == label else "yellow"
    print(f"[{color}]Brute force:   class {brute}[/{color}]")
