"""
CLI interface for param-sweep.

This module provides the command line entry point of the pipeline:
plan -> run / sbatch + submit -> report.
"""

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, NoReturn, Optional, TypeVar

import click
import typer
from rich.console import Console
from rich.markup import escape
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from .aggregate import GRID_INDICATORS
from .core import SweepWorkspace, load_plan_config
from .exceptions import (
    ConfigError,
    DataError,
    FormatError,
    PlanError,
    SubmitError,
    SweepEnvironmentError,
    SweepError,
    SweepIOError,
)
from .models import SlurmConfig
from .parser import ConfigParser, parse_chunk_xml
from .runner import RunReport, SimulatorAdapter, default_workers, parse_adapter_option, run_chunk
from .utils.logger import get_logger, set_log_level, setup_logger

EXIT_OK = 0
EXIT_TASK_FAILURES = 1
EXIT_CONFIG = 2
EXIT_ENVIRONMENT = 3
EXIT_DATA = 4

app = typer.Typer(
    name="param-sweep",
    help="Plan, run, submit and report parameter sweeps of simulation models",
    add_completion=False,
)

console = Console(highlight=False, soft_wrap=True)
err_console = Console(stderr=True, highlight=False, soft_wrap=True)

setup_logger()
logger = get_logger(__name__)

T = TypeVar("T")


@dataclass
class CliState:
    """Global options shared by every command."""

    config: Optional[Path]
    out: Path
    verbose: int

    @property
    def workspace(self) -> SweepWorkspace:
        return SweepWorkspace(self.out)


def exit_code(error: SweepError) -> int:
    """Maps an error to the documented process exit code."""
    if isinstance(error, SubmitError):
        return EXIT_TASK_FAILURES
    if isinstance(error, SweepEnvironmentError):
        return EXIT_ENVIRONMENT
    if isinstance(error, DataError):
        return EXIT_DATA
    if isinstance(error, (ConfigError, PlanError, FormatError, SweepIOError)):
        return EXIT_CONFIG
    return EXIT_TASK_FAILURES


def fail(error: SweepError) -> NoReturn:
    logger.debug("Command failed", exc_info=error)
    err_console.print(f"[bold red]✗ Error: {escape(str(error))}[/bold red]")
    raise typer.Exit(exit_code(error))


def guarded(action: Callable[[], T]) -> T:
    """Runs a pipeline action, turning sweep errors into exit codes."""
    try:
        return action()
    except SweepError as e:
        fail(e)


@app.callback()
def main_options(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None,
        "--config",
        "-c",
        help="Sweep config file (JSON)",
        dir_okay=False,
    ),
    out: Path = typer.Option(
        Path("sweep"),
        "--out",
        "-o",
        help="Workspace directory",
        file_okay=False,
    ),
    verbose: int = typer.Option(
        0,
        "--verbose",
        "-v",
        count=True,
        help="Log progress to stderr (-vv for debug output)",
    ),
) -> None:
    """Parameter sweeps: plan -> run or sbatch/submit -> report."""
    set_log_level({0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG))
    ctx.obj = CliState(config=config, out=out, verbose=verbose)


@app.command()
def plan(
    ctx: typer.Context,
    clean: bool = typer.Option(
        False, "--clean", help="Remove existing chunk plan files before writing"
    ),
    start_seed: Optional[int] = typer.Option(
        None, "--start-seed", min=0, help="Seed of replication 0 (overrides the config)"
    ),
) -> None:
    """
    Enumerates the experiment space and writes the chunk plan files.

    Examples:
        param-sweep --config sweep.json --out runs/a plan
        param-sweep -c sweep.json -o runs/b plan --start-seed 1000
    """
    state: CliState = ctx.obj
    if state.config is None:
        fail(ConfigError("a config file is required (--config)", field="config"))

    config = guarded(lambda: ConfigParser().load(state.config))
    result = guarded(
        lambda: state.workspace.generate_plan(config, clean=clean, start_seed=start_seed)
    )

    console.print(f"points={result.points} tasks={result.tasks} chunks={result.chunks}")
    if state.verbose:
        if result.removed_files:
            console.print(f"Removed {result.removed_files} old chunk file(s)")
        console.print(f"Plan: {result.plan_file}")
        console.print(f"Execution time: {result.execution_time:.2f}s")
    console.print(f"[bold green]✓ Plan written to {state.out}[/bold green]")


@app.command()
def run(
    ctx: typer.Context,
    workers: Optional[int] = typer.Option(
        None,
        "--workers",
        "-w",
        min=1,
        envvar="SWEEP_WORKERS",
        help="Concurrent workers (default: SWEEP_WORKERS, else all cores)",
    ),
    adapter: Optional[str] = typer.Option(
        None,
        "--adapter",
        "-a",
        help="'builtin' or an external command with {xml} and {outdir}",
    ),
) -> None:
    """
    Runs the unfinished tasks of the plan on this machine.

    Examples:
        param-sweep -o runs/a run --workers 4
        param-sweep -o runs/a run --adapter "gama-headless {xml} {outdir}"
    """
    workspace: SweepWorkspace = ctx.obj.workspace
    config = guarded(workspace.load_config)
    n_workers = workers if workers is not None else guarded(default_workers)
    if adapter:
        simulator = _adapter(adapter, config.model)
    else:
        simulator = guarded(lambda: workspace.adapter(config))

    pending = guarded(workspace.pending_tasks)
    console.print(
        f"[bold blue]Running {len(pending)} task(s) with {n_workers} worker(s)[/bold blue]"
    )

    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
        disable=not console.is_terminal,
    ) as progress:
        bar = progress.add_task("Simulating", total=len(pending))
        report = guarded(
            lambda: workspace.run_local(
                n_workers, simulator, progress=lambda n: progress.advance(bar, n)
            )
        )

    _print_run_report(report)
    if not report.ok:
        raise typer.Exit(EXIT_TASK_FAILURES)


@app.command()
def sbatch(
    ctx: typer.Context,
    timeout: Optional[int] = typer.Option(None, "--timeout", min=1, help="Job time limit in hours"),
    cores: Optional[int] = typer.Option(None, "--cores", min=1, help="CPUs per array task"),
    nodes: Optional[int] = typer.Option(None, "--nodes", min=1, help="Nodes per array task"),
    max_submission: Optional[int] = typer.Option(
        None, "--max-submission", min=1, help="Array tasks running at the same time"
    ),
    job_name: Optional[str] = typer.Option(None, "--job-name", help="SLURM job name"),
    extra_directive: Optional[List[str]] = typer.Option(
        None, "--extra-directive", help="Extra #SBATCH line (repeatable)"
    ),
    adapter: Optional[str] = typer.Option(
        None, "--adapter", "-a", help="'builtin' or an external command with {xml} and {outdir}"
    ),
) -> None:
    """
    Writes the SLURM array job script and chunk manifest.

    Examples:
        param-sweep -o runs/a sbatch --timeout 7 --cores 36 --nodes 16 --max-submission 6
    """
    workspace: SweepWorkspace = ctx.obj.workspace
    config = guarded(workspace.load_config)

    overrides = {
        "job_timeout_hours": timeout,
        "cores_per_node": cores,
        "nodes": nodes,
        "max_submission": max_submission,
        "job_name": job_name,
        "extra_directives": tuple(extra_directive) if extra_directive else None,
    }
    slurm = guarded(lambda: _slurm_config(config.slurm, overrides))
    simulator = _adapter(adapter, config.model) if adapter else None

    files = guarded(lambda: workspace.prepare_sbatch(slurm, simulator))
    console.print(f"[bold green]✓ Array job of {files.n_chunks} chunk(s) prepared[/bold green]")
    console.print(f"Script: {files.script}")
    console.print(f"Manifest: {files.manifest}")


@app.command()
def submit(ctx: typer.Context) -> None:
    """
    Submits the prepared array job with sbatch and prints its job id.

    Examples:
        param-sweep -o runs/a submit
    """
    workspace: SweepWorkspace = ctx.obj.workspace
    job_id = guarded(workspace.submit)
    console.print(f"[bold green]✓ Submitted batch job {job_id}[/bold green]")


@app.command()
def report(
    ctx: typer.Context,
    grid_indicator: str = typer.Option(
        "deaths",
        "--grid-indicator",
        "-g",
        click_type=click.Choice(list(GRID_INDICATORS)),
        help="Scalar shown in the grid CSV and heatmap",
    ),
    title: Optional[str] = typer.Option(
        None, "--title", "-t", help="Figure title (default: experiment name)"
    ),
) -> None:
    """
    Aggregates replications and writes summary CSVs and SVG figures.

    Examples:
        param-sweep -o runs/a report
        param-sweep -o runs/a report --grid-indicator lastDeathDay --title "Viral load"
    """
    workspace: SweepWorkspace = ctx.obj.workspace
    result = guarded(lambda: workspace.report(grid_indicator=grid_indicator, title=title))

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Artifact", style="cyan")
    table.add_column("Files", style="green", justify="right")
    table.add_row("Point summaries (CSV)", str(len(result.summary_files)))
    table.add_row("Time series (SVG)", str(len(result.timeseries_files)))
    table.add_row("Grid (CSV)", str(int(result.grid_file is not None)))
    table.add_row("Heatmap (SVG)", str(int(result.heatmap_file is not None)))
    console.print(table)

    if result.notice:
        console.print(f"[yellow]{result.notice}[/yellow]")
    console.print(f"[bold green]✓ Report written to {workspace.report_dir}[/bold green]")


@app.command("exec-chunk")
def exec_chunk(
    xml_file: Path = typer.Argument(
        ..., help="Chunk plan file plan-<k>.xml", exists=True, dir_okay=False
    ),
    out_dir: Path = typer.Argument(..., help="Directory for task-<id>.csv files", file_okay=False),
    plan_file: Path = typer.Option(
        ..., "--plan", help="plan.json holding the model parameters", dir_okay=False
    ),
    workers: int = typer.Option(1, "--workers", "-w", min=1, help="Concurrent workers"),
) -> None:
    """
    Runs the tasks of one chunk plan file with the built-in model.

    Examples:
        param-sweep exec-chunk runs/a/plans/plan-3.xml runs/a/batch_output --plan runs/a/plan.json
    """
    config = guarded(lambda: load_plan_config(plan_file))
    chunk = guarded(lambda: parse_chunk_xml(xml_file))
    result = guarded(
        lambda: run_chunk(chunk, config.model, config.exploration, out_dir, workers=workers)
    )
    _print_run_report(result)
    if not result.ok:
        raise typer.Exit(EXIT_TASK_FAILURES)


@app.command()
def version() -> None:
    """
    Shows utility version.

    Examples:
        param-sweep version
    """
    from . import __version__

    console.print(f"[bold blue]param-sweep version {__version__}[/bold blue]")


def _adapter(option: str, params) -> SimulatorAdapter:
    return guarded(lambda: parse_adapter_option(option, params))


def _slurm_config(base: SlurmConfig, overrides: dict) -> SlurmConfig:
    updates = {key: value for key, value in overrides.items() if value is not None}
    try:
        return SlurmConfig.model_validate({**base.model_dump(), **updates})
    except ValueError as e:
        raise ConfigError(str(e).splitlines()[0], field="slurm") from e


def _print_run_report(report: RunReport) -> None:
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Tasks", style="cyan")
    table.add_column("Count", justify="right")
    table.add_row("Succeeded", f"[green]{report.tasks_succeeded}[/green]")
    table.add_row("Failed", f"[red]{report.tasks_failed}[/red]" if report.tasks_failed else "0")
    table.add_row("Already complete", str(report.tasks_skipped))
    console.print(table)
    console.print(f"Wall clock: {report.wall_clock:.2f}s")

    if report.failures:
        console.print(f"[bold red]✗ {report.tasks_failed} task(s) failed:[/bold red]")
        for task_id, reason in report.failures[:20]:
            console.print(f"  - task {task_id}: {escape(reason)}")
        if len(report.failures) > 20:
            console.print(f"  ... and {len(report.failures) - 20} more")
    else:
        console.print("[bold green]✓ All tasks completed[/bold green]")


def main() -> None:
    """
    Main CLI function.
    """
    try:
        app()
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation interrupted by user[/yellow]")
        sys.exit(130)


if __name__ == "__main__":
    main()
