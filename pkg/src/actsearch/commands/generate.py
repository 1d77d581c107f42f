# typer cmd : actsearch generate
from pathlib import Path
from typing import Optional

import typer
from rich import print

from actsearch import dataset
from actsearch.commands.common import (
    classes_option,
    command_handler,
    n_option,
    pick,
    seed_option,
)


@command_handler
def generate_command(
    n: Optional[int] = n_option(),
    classes: Optional[int] = classes_option(),
    seed: Optional[int] = seed_option(),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output CSV path"),
):
    """Generate uniform points in the unit square with uniform labels."""
    out = Path(pick(out, "dataset", "out", "points.csv"))
    ds = dataset.generate(
        pick(n, "dataset", "n", 1000),
        pick(classes, "dataset", "classes", 3),
        pick(seed, "dataset", "seed", 42),
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    dataset.save(ds, out)
    print(f"[green]Wrote {len(ds)} points ({ds.num_classes} classes) to {out}[/green]")
