# typer cmd : actsearch tradeoff
from pathlib import Path
from typing import List, Optional

import typer
from rich import print
from rich.table import Table

from actsearch.bench import (
    DEFAULT_RESOLUTIONS,
    TradeoffConfig,
    TradeoffRow,
    run_tradeoff,
    write_tradeoff_csv,
)
from actsearch.commands.common import (
    classes_option,
    command_handler,
    k_option,
    max_iters_option,
    metric_option,
    n_option,
    pick,
    r0_option,
    resolve_metric,
    seed_option,
)
from actsearch.errors import ConfigurationError
from actsearch.raster import Metric
from actsearch.utils import get_setting


def display_rows(rows: List[TradeoffRow]):
    table = Table(title="Resolution trade-off")
    for column in (
        "resolution",
        "build ms",
        "query mean us",
        "collisions",
        "agreement (world)",
        "agreement (pixel)",
    ):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            str(row.resolution),
            f"{row.build_ms:.3f}",
            f"{row.query_mean_us:.3f}",
            f"{row.collision_fraction:.2%}",
            f"{row.agreement_world:.3f}",
            f"{row.agreement_pixel:.3f}",
        )
    print(table)


@command_handler
def tradeoff_command(
    resolution: Optional[List[int]] = typer.Option(
        None, "--resolution", min=1, help="Image resolution (repeat for a sweep)"
    ),
    n: Optional[int] = n_option(),
    classes: Optional[int] = classes_option(),
    k: Optional[int] = k_option(),
    r0: Optional[int] = r0_option(),
    max_iters: Optional[int] = max_iters_option(),
    metric: Optional[Metric] = metric_option(),
    queries: Optional[int] = typer.Option(None, "--queries", min=1, help="Held-out queries"),
    seed: Optional[int] = seed_option(),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Result CSV path"),
):
    """Report accuracy and query cost of active search per image resolution."""
    try:
        cfg = TradeoffConfig(
            resolutions=tuple(resolution)
            if resolution
            else tuple(get_setting("tradeoff", "resolutions", DEFAULT_RESOLUTIONS)),
            n=pick(n, "tradeoff", "n", 10_000),
            num_classes=pick(classes, "dataset", "classes", 3),
            k=pick(k, "search", "k", 11),
            r0=pick(r0, "search", "r0", 100),
            max_iters=pick(max_iters, "search", "max_iters", 64),
            metric=resolve_metric(metric),
            num_queries=pick(queries, "bench", "queries", 100),
            seed=pick(seed, "dataset", "seed", 42),
            margin_fraction=get_setting("dataset", "margin_fraction", 0.05),
        )
    except ConfigurationError as e:
        raise typer.BadParameter(str(e)) from e
    out = Path(pick(out, "tradeoff", "out", "tradeoff.csv"))

    rows = run_tradeoff(
        cfg,
        on_row=lambda row: print(f"[blue]resolution={row.resolution} done[/blue]"),
    )
    display_rows(rows)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_tradeoff_csv(rows, out)
    print(f"[green]Results written to: {out}[/green]")
