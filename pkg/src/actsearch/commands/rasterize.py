# typer cmd : actsearch rasterize
import time
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
    load_dataset,
    metric_option,
    n_option,
    resolution_option,
    resolve_metric,
    seed_option,
)
from actsearch.raster import Metric, raster_stats


@command_handler
def rasterize_command(
    data: Optional[Path] = data_option(),
    n: Optional[int] = n_option(),
    classes: Optional[int] = classes_option(),
    seed: Optional[int] = seed_option(),
    resolution: Optional[int] = resolution_option(),
    metric: Optional[Metric] = metric_option(),
    buckets: bool = typer.Option(False, "--buckets", help="Keep per-pixel point ids"),
):
    """Rasterize a dataset onto per-class count planes and report statistics."""
    ds = load_dataset(data, n, classes, seed)
    start = time.perf_counter_ns()
    grid = build_grid(ds, resolution, resolve_metric(metric), buckets)
    build_ms = (time.perf_counter_ns() - start) / 1e6
    stats = raster_stats(grid)

    table = Table(title=f"{grid.resolution}x{grid.resolution} grid")
    table.add_column("Metric")
    table.add_column("Value", justify="right")
    table.add_row("points", str(stats.total_points))
    table.add_row("occupied pixels", str(stats.occupied_pixels))
    table.add_row("collision pixels", str(stats.collision_pixels))
    for label, total in enumerate(stats.class_totals):
        table.add_row(f"class {label}", str(total))
    table.add_row("build ms", f"{build_ms:.3f}")
    print(table)

    if stats.collision_pixels:
        print(
            f"[yellow]Warning: {stats.collision_pixels} pixels hold more than one point; "
            "raise --resolution for exact neighbor identities[/yellow]"
        )
