# src/actsearch/cli.py
from importlib import import_module

import typer

from .utils import load_config

app = typer.Typer(
    name="actsearch",
    help="Active search for nearest neighbors on rasterized point sets",
    no_args_is_help=True,
)


def register_commands():
    """Dynamically register commands from configuration."""
    commands_config = load_config(config_type="command")

    for cmd_name, cmd_config in commands_config.items():
        module_path = f"actsearch.commands.{cmd_config['file'].replace('.py', '')}"
        try:
            cmd_module = import_module(module_path)
            func = getattr(cmd_module, cmd_config["command"])
        except (ImportError, AttributeError) as e:
            typer.echo(f"Warning: Could not load command {cmd_name}: {e}")
            continue

        help_text = cmd_config.get("help")
        app.command(name=cmd_name, help=help_text)(func)

        for alias in cmd_config.get("alias", []):
            app.command(name=alias, help=help_text, hidden=True)(func)


# Register commands from configuration
register_commands()

if __name__ == "__main__":
    app()
