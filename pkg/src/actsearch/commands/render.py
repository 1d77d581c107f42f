# typer cmd : actsearch render
from pathlib import Path
from typing import Optional

import typer
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
    pick,
    query_point,
    r0_option,
    resolution_option,
    resolve_metric,
    search_params,
    seed_option,
    x_option,
    y_option,
)
from actsearch.raster import Metric, render
from actsearch.search import active_knn


@command_handler
def render_command(
    data: Optional[Path] = data_option(),
    n: Optional[int] = n_option(),
    classes: Optional[int] = classes_option(),
    seed: Optional[int] = seed_option(),
    resolution: Optional[int] = resolution_option(),
    metric: Optional[Metric] = metric_option(),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output PPM path"),
    overlay_trace: bool = typer.Option(
        False, "--overlay-trace", help="Draw the query mark and every searched radius"
    ),
    x: Optional[float] = x_option(),
    y: Optional[float] = y_option(),
    k: Optional[int] = k_option(),
    r0: Optional[int] = r0_option(),
    max_iters: Optional[int] = max_iters_option(),
):
    """Render the grid as a binary PPM, one colour per class."""
    out = Path(pick(out, "render", "out", "grid.ppm"))
    ds = load_dataset(data, n, classes, seed)
    metric = resolve_metric(metric)
    grid = build_grid(ds, resolution, metric, buckets=False)

    overlay = None
    if overlay_trace:
        params = search_params(k, r0, max_iters, metric, len(ds))
        result = active_knn(grid, query_point(ds, x, y), params)
        overlay = (result.query_pixel, result.trace.radii)
        radii = ", ".join(str(r) for r in result.trace.radii)
        print(f"[blue]Overlaying radii {radii} around pixel {tuple(result.query_pixel)}[/blue]")

    out.parent.mkdir(parents=True, exist_ok=True)
    render(grid, out, overlay)
    print(f"[green]Image written to: {out}[/green]")
