# typer cmd : actsearch bench
from pathlib import Path
from typing import List, Optional

import typer
from rich import print
from rich.table import Table

from actsearch.bench import (
    DEFAULT_N_VALUES,
    BenchConfig,
    BenchRow,
    run_bench,
    write_predictions_csv,
    write_rows_csv,
)
from actsearch.commands.common import (
    classes_option,
    command_handler,
    k_option,
    max_iters_option,
    metric_option,
    pick,
    r0_option,
    resolution_option,
    resolve_metric,
    seed_option,
)
from actsearch.errors import ConfigurationError
from actsearch.raster import Metric
from actsearch.utils import get_setting


def display_rows(rows: List[BenchRow]):
    table = Table(title="Brute force vs active search")
    for column in ("n", "method", "build ms", "query total ms", "query mean us", "agreement"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            str(row.n),
            row.method.value,
            f"{row.build_ms:.3f}",
            f"{row.query_total_ms:.3f}",
            f"{row.query_mean_us:.3f}",
            "" if row.agreement_vs_brute is None else f"{row.agreement_vs_brute:.3f}",
        )
    print(table)


def print_progress(row: BenchRow):
    print(f"[blue]n={row.n} {row.method.value}: {row.query_mean_us:.1f} us/query[/blue]")


@command_handler
def bench_command(
    n: Optional[List[int]] = typer.Option(
        None, "--n", min=1, help="Dataset size (repeat for a sweep)"
    ),
    classes: Optional[int] = classes_option(),
    k: Optional[int] = k_option(),
    r0: Optional[int] = r0_option(),
    max_iters: Optional[int] = max_iters_option(),
    resolution: Optional[int] = resolution_option(),
    metric: Optional[Metric] = metric_option(),
    queries: Optional[int] = typer.Option(None, "--queries", min=1, help="Held-out queries per N"),
    seed: Optional[int] = seed_option(),
    repeats: Optional[int] = typer.Option(None, "--repeats", min=1, help="Timing repeats (minimum is reported)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Result CSV path"),
    predictions: Optional[Path] = typer.Option(
        None, "--predictions", help="Also write per-query predictions to this CSV"
    ),
):
    """Time brute-force and active-search classification across N."""
    try:
        cfg = BenchConfig(
            n_values=tuple(n) if n else tuple(get_setting("bench", "n_values", DEFAULT_N_VALUES)),
            num_classes=pick(classes, "dataset", "classes", 3),
            k=pick(k, "search", "k", 11),
            r0=pick(r0, "search", "r0", 100),
            max_iters=pick(max_iters, "search", "max_iters", 64),
            resolution=pick(resolution, "grid", "resolution", 3000),
            metric=resolve_metric(metric),
            num_queries=pick(queries, "bench", "queries", 100),
            seed=pick(seed, "dataset", "seed", 42),
            repeats=pick(repeats, "bench", "repeats", 3),
            margin_fraction=get_setting("dataset", "margin_fraction", 0.05),
        )
    except ConfigurationError as e:
        raise typer.BadParameter(str(e)) from e
    out = Path(pick(out, "bench", "out", "bench.csv"))

    print(f"[blue]Benchmarking N = {', '.join(str(v) for v in cfg.n_values)}[/blue]")
    result = run_bench(cfg, on_row=print_progress)

    display_rows(result.rows)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_rows_csv(result.rows, out)
    print(f"[green]Results written to: {out}[/green]")
    if predictions is not None:
        predictions.parent.mkdir(parents=True, exist_ok=True)
        write_predictions_csv(result.predictions, predictions)
        print(f"[green]Predictions written to: {predictions}[/green]")
