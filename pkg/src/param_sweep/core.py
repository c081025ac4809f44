"""
Sweep workspace orchestration.

A ``SweepWorkspace`` owns one output directory and coordinates the pipeline
stages on it: planning, local execution, SLURM preparation and submission,
and reporting. The directory layout is fixed::

    plan.json
    plans/plan-<chunkId>.xml
    batch_output/task-<taskId>.csv
    slurm/job.sbatch, slurm/chunks.manifest, slurm/logs/
    report/
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from .aggregate import PointSummary, build_grid, iter_points, summarize_point, summarize_scalars
from .exceptions import ConfigError, PlanError
from .generators.plan_xml import PlanXMLGenerator
from .generators.sbatch import SbatchFiles, SbatchGenerator, SCRIPT_NAME, MANIFEST_NAME, LOGS_DIR
from .models import SlurmConfig, SweepConfig
from .parser import ConfigParser, ConfigValidator
from .plan import ExperimentPlan, build_plan, chunk_file_name, chunk_plan, plan_cardinality
from .report import (
    export_grid_csv,
    export_points_csv,
    export_summary_csv,
    grid_file_name,
    render_heatmap,
    render_timeseries,
    summary_file_name,
    timeseries_file_name,
    write_svg,
)
from .runner import RunReport, SimulatorAdapter, adapter_from_config, resume, run_local
from .slurm import run_slurm
from .utils.helpers import atomic_write_text, ensure_directory
from .utils.logger import get_logger
from .utils.template_filters import value_label

logger = get_logger(__name__)

PLAN_FILE = "plan.json"
PLANS_DIR = "plans"
OUTPUT_DIR = "batch_output"
SLURM_DIR = "slurm"
REPORT_DIR = "report"
POINTS_FILE = "points.csv"


@dataclass
class PlanResult:
    """Outcome of planning an exploration."""

    points: int
    tasks: int
    chunks: int
    plan_file: Path
    chunk_files: List[Path]
    removed_files: int = 0
    execution_time: float = 0.0


@dataclass
class ReportResult:
    """Files written by the report stage."""

    summary_files: List[Path] = field(default_factory=list)
    timeseries_files: List[Path] = field(default_factory=list)
    points_file: Optional[Path] = None
    grid_file: Optional[Path] = None
    heatmap_file: Optional[Path] = None
    notice: Optional[str] = None
    execution_time: float = 0.0

    @property
    def files(self) -> List[Path]:
        extra = [p for p in (self.points_file, self.grid_file, self.heatmap_file) if p is not None]
        return self.summary_files + self.timeseries_files + extra


def config_document(config: SweepConfig) -> Dict[str, Any]:
    """Serializes a config to the JSON form accepted by the config validator."""
    document = config.model_dump(mode="json", by_alias=True, exclude_none=True)
    document["parameters"] = [spec.to_flat() for spec in config.parameters]
    return document


class SweepWorkspace:
    """
    One exploration's output directory and the operations run on it.

    Every operation is idempotent for unchanged inputs: re-running it
    rewrites identical files.
    """

    def __init__(self, root: Union[str, Path]) -> None:
        self.root = Path(root)
        self.logger = logger

    @property
    def plan_file(self) -> Path:
        return self.root / PLAN_FILE

    @property
    def plans_dir(self) -> Path:
        return self.root / PLANS_DIR

    @property
    def output_dir(self) -> Path:
        return self.root / OUTPUT_DIR

    @property
    def report_dir(self) -> Path:
        return self.root / REPORT_DIR

    def slurm_dir(self, slurm: Optional[SlurmConfig] = None) -> Path:
        if slurm is not None and slurm.work_dir:
            return Path(slurm.work_dir)
        return self.root / SLURM_DIR

    def generate_plan(
        self, config: SweepConfig, clean: bool = False, start_seed: Optional[int] = None
    ) -> PlanResult:
        """
        Builds the plan and writes ``plan.json`` and the chunk plan files.

        Args:
            config: Validated sweep config
            clean: Remove existing chunk files first
            start_seed: Overrides ``exploration.startSeed``

        Returns:
            PlanResult

        Raises:
            PlanError: If stale chunk files from a larger plan would remain
            SweepIOError: If the workspace is not writable
        """
        started = time.perf_counter()
        if start_seed is not None:
            config = config.model_copy(
                update={
                    "exploration": config.exploration.model_copy(update={"start_seed": start_seed})
                }
            )

        plan = build_plan(config.exploration, config.parameters)
        chunks = chunk_plan(plan)
        ensure_directory(self.root)
        plans_dir = ensure_directory(self.plans_dir)

        # chunk files from an earlier, larger plan
        removed = 0
        expected = {chunk.file_name for chunk in chunks}
        existing = sorted(plans_dir.glob("plan-*.xml"))
        if clean:
            for path in existing:
                path.unlink()
                removed += 1
        else:
            stale = [path.name for path in existing if path.name not in expected]
            if stale:
                raise PlanError(
                    f"{len(stale)} stale chunk file(s) in {plans_dir} (e.g. {stale[0]}); "
                    "re-plan with --clean"
                )

        chunk_files = PlanXMLGenerator().write_chunks(chunks, config.exploration, plans_dir)

        # plan.json last; its presence marks a complete plan
        points, tasks, n_chunks = plan_cardinality(config.exploration, config.parameters)
        document = {
            "config": config_document(config),
            "points": points,
            "tasks": tasks,
            "chunks": n_chunks,
        }
        atomic_write_text(self.plan_file, json.dumps(document, sort_keys=True, indent=2) + "\n")

        return PlanResult(
            points=points,
            tasks=tasks,
            chunks=n_chunks,
            plan_file=self.plan_file,
            chunk_files=chunk_files,
            removed_files=removed,
            execution_time=time.perf_counter() - started,
        )

    def load_config(self) -> SweepConfig:
        """
        Reads the config stored in ``plan.json``.

        Raises:
            ConfigError: If the workspace has no plan
        """
        return load_plan_config(self.plan_file)

    def load_plan(self) -> ExperimentPlan:
        config = self.load_config()
        return build_plan(config.exploration, config.parameters)

    def adapter(self, config: Optional[SweepConfig] = None) -> SimulatorAdapter:
        config = config or self.load_config()
        return adapter_from_config(config.adapter, config.model)

    def pending_tasks(self) -> List[int]:
        config = self.load_config()
        plan = build_plan(config.exploration, config.parameters)
        return resume(plan, self.output_dir, config.model)

    def run_local(
        self,
        workers: int,
        adapter: Optional[SimulatorAdapter] = None,
        progress: Optional[Callable[[int], None]] = None,
    ) -> RunReport:
        """
        Runs the unfinished tasks of the plan on this machine.

        Args:
            workers: Maximum number of concurrent workers
            adapter: Simulator adapter; the config's adapter by default
            progress: Called with 1 for every finished task

        Returns:
            RunReport
        """
        config = self.load_config()
        plan = build_plan(config.exploration, config.parameters)
        return run_local(plan, adapter or self.adapter(config), workers, self.output_dir, progress)

    def prepare_sbatch(
        self, slurm: Optional[SlurmConfig] = None, adapter: Optional[SimulatorAdapter] = None
    ) -> SbatchFiles:
        """
        Writes the SLURM array job of the plan.

        Args:
            slurm: Resources; the config's ``slurm`` section by default
            adapter: Simulator adapter; the config's adapter by default

        Raises:
            PlanError: If chunk plan files are missing
        """
        config = self.load_config()
        slurm = slurm or config.slurm
        adapter = adapter or self.adapter(config)
        n_chunks = json.loads(self.plan_file.read_text(encoding="utf-8"))["chunks"]

        chunk_paths = [self.plans_dir / chunk_file_name(k) for k in range(n_chunks)]
        missing = [path.name for path in chunk_paths if not path.is_file()]
        if missing:
            raise PlanError(f"Missing chunk plan file(s): {', '.join(missing[:5])}")

        ensure_directory(self.output_dir)
        command = adapter.batch_command(self.output_dir.resolve(), self.plan_file.resolve())
        return SbatchGenerator().prepare_sbatch(chunk_paths, slurm, command, self.slurm_dir(slurm))

    def submit(self, executable: str = "sbatch") -> str:
        """
        Submits the prepared array job.

        Returns:
            Job id

        Raises:
            ConfigError: If ``job.sbatch`` has not been generated
        """
        directory = self.slurm_dir(self.load_config().slurm)
        script = directory / SCRIPT_NAME
        if not script.is_file():
            raise ConfigError(f"No {SCRIPT_NAME} in {directory}; run 'param-sweep sbatch' first")
        n_chunks = len((directory / MANIFEST_NAME).read_text(encoding="utf-8").splitlines())
        files = SbatchFiles(
            script=script,
            manifest=directory / MANIFEST_NAME,
            logs_dir=directory / LOGS_DIR,
            n_chunks=n_chunks,
        )
        return run_slurm(files, executable=executable)

    def report(self, grid_indicator: str = "deaths", title: Optional[str] = None) -> ReportResult:
        """
        Aggregates every point and writes the report files.

        The heatmap is produced only when exactly two parameters are swept;
        otherwise ``notice`` explains why it was skipped.

        Args:
            grid_indicator: ``deaths``, ``lastDeathDay`` or ``peakHospitalized``
            title: Figure title; the experiment name by default

        Returns:
            ReportResult

        Raises:
            MissingOutputsError: If task outputs are missing or incomplete
            DataError: If outputs cannot be aggregated
        """
        started = time.perf_counter()
        config = self.load_config()
        plan = build_plan(config.exploration, config.parameters)
        report_dir = ensure_directory(self.report_dir)
        title = title or config.exploration.experiment_name
        result = ReportResult()

        scalars: List[PointSummary] = []
        points = iter_points(plan, self.output_dir, config.model)
        for point_index, assignment, trajectories in points:
            summary = summarize_point(trajectories, assignment)
            scalars.append(summarize_scalars(trajectories, assignment))
            result.summary_files.append(
                export_summary_csv(summary, report_dir / summary_file_name(point_index))
            )
            result.timeseries_files.append(
                write_svg(
                    render_timeseries(summary, _point_title(title, point_index, assignment)),
                    report_dir / timeseries_file_name(point_index),
                )
            )

        result.points_file = export_points_csv(
            scalars, plan.parameter_names, report_dir / POINTS_FILE
        )

        if len(plan.specs) == 2:
            grid = build_grid(scalars, plan.specs[0], plan.specs[1], grid_indicator)
            result.grid_file = export_grid_csv(grid, report_dir / grid_file_name(grid_indicator))
            result.heatmap_file = write_svg(
                render_heatmap(grid, f"{title}: median {grid_indicator}"),
                report_dir / grid_file_name(grid_indicator, "svg"),
            )
        else:
            result.notice = (
                f"Heatmap skipped: a grid needs exactly 2 swept parameters, "
                f"the plan sweeps {len(plan.specs)}"
            )
            self.logger.info(result.notice)

        result.execution_time = time.perf_counter() - started
        return result


def load_plan_config(plan_file: Union[str, Path]) -> SweepConfig:
    """
    Reads the config stored in a ``plan.json``.

    Raises:
        ConfigError: If the file is missing or invalid
    """
    plan_file = Path(plan_file)
    if not plan_file.is_file():
        raise ConfigError(f"No plan found at {plan_file}; run 'param-sweep plan' first")
    document = ConfigParser().parse_file(plan_file)
    if not isinstance(document, dict) or "config" not in document:
        raise ConfigError(f"{plan_file} does not describe a plan")
    return ConfigValidator().build(document["config"])


def _point_title(title: str, point_index: int, assignment: Dict[str, Any]) -> str:
    values = ", ".join(f"{name}={value_label(value)}" for name, value in assignment.items())
    return f"{title}: point {point_index}" + (f" ({values})" if values else "")
