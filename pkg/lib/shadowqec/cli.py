#!/usr/bin/env python3
"""
shadowqec command line.

Usage:
    shadowqec lifetimes --config run.yaml --method both
    shadowqec dephasing --config run.yaml --seed 7 --threads 4
    shadowqec rates | plan | transmon [--config FILE] [--out DIR]
    shadowqec run run.yaml          # experiment named in the document
    shadowqec validate run.yaml

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from pathlib import Path
from typing import Any, Callable, Optional

import typer
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .config import SweepConfig
from .config_loader import ConfigLoader, format_errors
from .errors import NumericalError, ShadowQECError
from .experiments import run_experiment
from .types import ExitCode, ExperimentKind

app = typer.Typer(help="Simulate the passively corrected two-transmon logical qubit")
console = Console()

ConfigOption = typer.Option(None, "--config", "-c", help="YAML or JSON run document")
OutOption = typer.Option(None, "--out", "-o", help="Output directory")
SeedOption = typer.Option(None, "--seed", help="Master seed (overrides config)")
ThreadsOption = typer.Option(None, "--threads", "-j", help="Worker threads")
MethodOption = typer.Option(None, "--method", help="spectral, timedomain or both")


def _load(
    config_path: Optional[Path],
    experiment: Optional[ExperimentKind],
    overrides: dict[str, Any],
) -> SweepConfig:
    if experiment is not None:
        overrides = {**overrides, "experiment": experiment}
    if config_path is None:
        data = {k: v for k, v in overrides.items() if v is not None}
        return SweepConfig.model_validate(data)
    return ConfigLoader(config_path).load(overrides)


def _execute(load: Callable[[], SweepConfig]) -> None:
    """Load, run and map failures to exit codes."""
    try:
        config = load()
    except ValidationError as e:
        console.print("[red]Error: invalid configuration[/red]")
        for message in format_errors(e):
            console.print(f"  {message}")
        raise typer.Exit(ExitCode.VALIDATION.value)
    except (yaml.YAMLError, FileNotFoundError, ValueError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(ExitCode.VALIDATION.value)

    try:
        paths = run_experiment(config)
    except NumericalError as e:
        console.print(f"[red]Numerical failure ({type(e).__name__}): {e}[/red]")
        raise typer.Exit(ExitCode.NUMERICAL.value)
    except (ShadowQECError, ValueError) as e:
        console.print(f"[red]Error ({type(e).__name__}): {e}[/red]")
        raise typer.Exit(ExitCode.VALIDATION.value)

    table = Table(title=f"{config.experiment} outputs")
    table.add_column("File", style="cyan")
    table.add_column("Bytes", justify="right")
    for path in paths:
        table.add_row(str(path), str(path.stat().st_size))
    console.print(table)


def _command(experiment: ExperimentKind) -> Callable[..., None]:
    def command(
        config: Optional[Path] = ConfigOption,
        out: Optional[Path] = OutOption,
        seed: Optional[int] = SeedOption,
        threads: Optional[int] = ThreadsOption,
        method: Optional[str] = MethodOption,
    ) -> None:
        overrides = {"output": out, "seed": seed, "threads": threads, "method": method}
        _execute(lambda: _load(config, experiment, overrides))

    command.__doc__ = f"Run the {experiment} experiment."
    return command


for _kind in ("lifetimes", "dephasing", "rates", "plan", "transmon"):
    app.command(name=_kind)(_command(_kind))  # type: ignore[arg-type]


@app.command()
def run(
    config: Path = typer.Argument(..., help="Run document naming its experiment"),
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
    method: Optional[str] = MethodOption,
) -> None:
    """Run the experiment named in the config document."""
    overrides = {"output": out, "seed": seed, "threads": threads, "method": method}
    _execute(lambda: _load(config, None, overrides))


@app.command()
def validate(config: Path = typer.Argument(..., help="Run document to check")) -> None:
    """Check a run document and print field-level errors."""
    ok, errors = ConfigLoader(config).validate()
    if not ok:
        for message in errors:
            console.print(f"[red]✗[/red] {message}")
        raise typer.Exit(ExitCode.VALIDATION.value)
    console.print(f"[green]✓[/green] {config} is valid")


def main() -> None:
    app()


if __name__ == "__main__":
    main()
