# typer cmd : actsearch query
from pathlib import Path
from typing import Optional

import typer
from rich import print
from rich.table import Table

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
from actsearch.raster import Metric
from actsearch.search import QueryResult, Termination, active_knn


def display_trace(result: QueryResult):
    """Display the (r_t, n_t) sequence of one search."""
    table = Table(title="Search trace")
    table.add_column("t", justify="right")
    table.add_column("r_t (px)", justify="right")
    table.add_column("n_t", justify="right")
    for t, step in enumerate(result.trace.steps):
        table.add_row(str(t), str(step.radius), str(step.count))
    print(table)
    color = "yellow" if result.trace.terminated_by == Termination.ITERATION_CAP else "blue"
    print(
        f"[{color}]Terminated by {result.trace.terminated_by.value} "
        f"at r={result.trace.final_radius}[/{color}]"
    )


def display_neighbors(result: QueryResult):
    table = Table(title=f"Neighbors of pixel {tuple(result.query_pixel)}")
    table.add_column("col", justify="right")
    table.add_column("row", justify="right")
    table.add_column("class", justify="right")
    table.add_column("distance (px)", justify="right")
    table.add_column("count", justify="right")
    table.add_column("ids")
    for nb in result.neighbors:
        ids = "" if nb.point_ids is None else ",".join(str(i) for i in nb.point_ids)
        table.add_row(
            str(nb.pixel.col),
            str(nb.pixel.row),
            str(nb.label),
            f"{nb.distance:.3f}",
            str(nb.count),
            ids,
        )
    print(table)


@command_handler
def query_command(
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
    buckets: bool = typer.Option(False, "--buckets", help="Report the ids of the neighbors"),
):
    """Find the k nearest neighbors of (x, y) and print the search trace."""
    ds = load_dataset(data, n, classes, seed)
    metric = resolve_metric(metric)
    params = search_params(k, r0, max_iters, metric, len(ds))
    grid = build_grid(ds, resolution, metric, buckets)
    result = active_knn(grid, query_point(ds, x, y), params)

    display_trace(result)
    display_neighbors(result)
    print(f"[green]Predicted class: {result.predicted_class}[/green]")
