"""
Local execution of experiment plans.

Tasks run on a bounded pool of workers, through the built-in model or an
external simulator command. Every task output is written under a temporary
name and renamed on success, so a parseable ``task-<id>.csv`` marks a
finished task and an interrupted sweep can be resumed.
"""

import itertools
import os
import shlex
import shutil
import subprocess
import sys
import time
from abc import ABC, abstractmethod
from concurrent.futures import (
    FIRST_COMPLETED,
    Executor,
    Future,
    ProcessPoolExecutor,
    ThreadPoolExecutor,
    wait,
)
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .exceptions import ConfigError, SweepError
from .generators.plan_xml import PlanXMLGenerator
from .models import AdapterConfig, EpidemicParams, ExplorationConfig
from .plan import Chunk, ExperimentPlan, SimulationTask
from .refmodel import run_simulation
from .trajectory import task_complete, write_trajectory
from .utils.helpers import ensure_directory
from .utils.logger import get_logger

logger = get_logger(__name__)

XML_PLACEHOLDER = "{xml}"
OUTDIR_PLACEHOLDER = "{outdir}"
PENDING_DIR = ".pending"
ATTEMPTS = 2

ProgressCallback = Callable[[int], None]
TaskOutcome = Tuple[int, Optional[str]]


@dataclass
class RunReport:
    """Counters of one local run; ``tasks_total`` counts executed tasks only."""

    tasks_total: int = 0
    tasks_succeeded: int = 0
    tasks_failed: int = 0
    failures: List[Tuple[int, str]] = field(default_factory=list)
    wall_clock: float = 0.0
    tasks_skipped: int = 0

    @property
    def ok(self) -> bool:
        return self.tasks_failed == 0

    def record(self, task_id: int, reason: Optional[str]) -> None:
        self.tasks_total += 1
        if reason is None:
            self.tasks_succeeded += 1
        else:
            self.tasks_failed += 1
            self.failures.append((task_id, reason))


class SimulatorAdapter(ABC):
    """How the tasks of a plan are turned into trajectory files."""

    kind: str = ""
    params: Optional[EpidemicParams] = None

    def check(self, plan: ExperimentPlan) -> None:
        """
        Rejects a plan the adapter cannot run, before anything executes.

        Raises:
            ConfigError: If the adapter is misconfigured for this plan
        """

    @abstractmethod
    def batch_command(self, out_dir: Path, plan_path: Path) -> str:
        """
        Shell command running the chunk whose plan file is in ``$XML``.

        Args:
            out_dir: Directory the trajectories are written to
            plan_path: The workspace ``plan.json``
        """

    @abstractmethod
    def execute(
        self,
        tasks: Sequence[SimulationTask],
        config: ExplorationConfig,
        workers: int,
        out_dir: Path,
        progress: Optional[ProgressCallback] = None,
    ) -> Iterator[TaskOutcome]:
        """
        Runs tasks and yields ``(task_id, failure reason or None)`` per task.
        """


class BuiltinAdapter(SimulatorAdapter):
    """Runs tasks in-process with the built-in epidemic model."""

    kind = "builtin"
    params: EpidemicParams

    def __init__(self, params: Optional[EpidemicParams] = None) -> None:
        self.params = params or EpidemicParams()

    def check(self, plan: ExperimentPlan) -> None:
        if plan.tasks:
            self.params.with_assignment(plan.tasks[0].assignment)

    def batch_command(self, out_dir: Path, plan_path: Path) -> str:
        return (
            f"{shlex.quote(sys.executable)} -m param_sweep exec-chunk \"$XML\" "
            f"{shlex.quote(str(out_dir))} --plan {shlex.quote(str(plan_path))}"
        )

    def execute(
        self,
        tasks: Sequence[SimulationTask],
        config: ExplorationConfig,
        workers: int,
        out_dir: Path,
        progress: Optional[ProgressCallback] = None,
    ) -> Iterator[TaskOutcome]:
        stop = config.stop_on_extinction
        if workers == 1:
            for task in tasks:
                outcome = run_builtin_task(self.params, task, stop, out_dir)
                _advance(progress)
                yield outcome
            return

        with ProcessPoolExecutor(max_workers=workers) as executor:
            submit = lambda task: executor.submit(  # noqa: E731
                run_builtin_task, self.params, task, stop, out_dir
            )
            for outcome in _bounded(executor, submit, tasks, window=2 * workers):
                _advance(progress)
                yield outcome


class ExternalAdapter(SimulatorAdapter):
    """
    Runs an external simulator once per chunk plan file.

    The command template must contain ``{xml}`` and ``{outdir}``; the command
    must exit 0 and write ``task-<id>.csv`` for every task of the chunk.
    """

    kind = "external"

    def __init__(
        self,
        command_template: str,
        timeout: Optional[float] = None,
        params: Optional[EpidemicParams] = None,
    ) -> None:
        missing = [
            placeholder
            for placeholder in (XML_PLACEHOLDER, OUTDIR_PLACEHOLDER)
            if placeholder not in command_template
        ]
        if missing:
            raise ConfigError(
                f"command template must contain {' and '.join(missing)}",
                field="adapter.command",
                value=command_template,
            )
        try:
            self.argv_template = shlex.split(command_template)
        except ValueError as e:
            raise ConfigError(f"cannot parse command: {e}", field="adapter.command") from e
        if not self.argv_template:
            raise ConfigError("empty command", field="adapter.command")
        self.command_template = command_template
        self.timeout = timeout
        self.params = params
        self.generator = PlanXMLGenerator()

    def batch_command(self, out_dir: Path, plan_path: Path) -> str:
        return self.command_template.replace(XML_PLACEHOLDER, '"$XML"').replace(
            OUTDIR_PLACEHOLDER, shlex.quote(str(out_dir))
        )

    def build_command(self, xml_path: Path, out_dir: Path) -> List[str]:
        """Substitutes the placeholders in every argument of the template."""
        return [
            argument.replace(XML_PLACEHOLDER, str(xml_path)).replace(
                OUTDIR_PLACEHOLDER, str(out_dir)
            )
            for argument in self.argv_template
        ]

    def execute(
        self,
        tasks: Sequence[SimulationTask],
        config: ExplorationConfig,
        workers: int,
        out_dir: Path,
        progress: Optional[ProgressCallback] = None,
    ) -> Iterator[TaskOutcome]:
        pending_dir = out_dir / PENDING_DIR
        chunks = _group_by_chunk(tasks, config.tasks_per_chunk)
        try:
            with ThreadPoolExecutor(workers, thread_name_prefix="Simulator") as executor:
                submit = lambda chunk: executor.submit(  # noqa: E731
                    self._run_chunk, chunk, config, pending_dir, out_dir
                )
                for outcomes in _bounded(executor, submit, chunks, window=workers):
                    for outcome in outcomes:
                        _advance(progress)
                        yield outcome
        finally:
            shutil.rmtree(pending_dir, ignore_errors=True)

    def _run_chunk(
        self, chunk: Chunk, config: ExplorationConfig, pending_dir: Path, out_dir: Path
    ) -> List[TaskOutcome]:
        # the plan file lives in a private directory, removed after the run
        xml_path = self.generator.write_chunk_xml(chunk, config, pending_dir)
        command = self.build_command(xml_path, out_dir)
        reason = "not executed"

        for attempt in range(1, ATTEMPTS + 1):
            logger.info("Chunk %d attempt %d: %s", chunk.chunk_id, attempt, " ".join(command))
            reason = self._invoke(command)
            # outputs are checked after a zero exit too
            incomplete = [
                task
                for task in chunk.tasks
                if not task_complete(task, out_dir, config.stop_on_extinction, self.params)
            ]
            if reason is None and not incomplete:
                return [(task.task_id, None) for task in chunk.tasks]
            if reason is None:
                reason = "missing or malformed output"
            logger.warning("Chunk %d attempt %d failed: %s", chunk.chunk_id, attempt, reason)

        # keep the tasks the last attempt did complete
        done = {task.task_id for task in chunk.tasks} - {task.task_id for task in incomplete}
        return [(task.task_id, None if task.task_id in done else reason) for task in chunk.tasks]

    def _invoke(self, command: List[str]) -> Optional[str]:
        try:
            result = subprocess.run(command, capture_output=True, text=True, timeout=self.timeout)
        except FileNotFoundError:
            return f"command not found: {command[0]}"
        except subprocess.TimeoutExpired:
            return f"timed out after {self.timeout}s"
        except OSError as e:
            return f"cannot start command: {e}"

        if result.returncode != 0:
            diagnostics = (result.stderr or result.stdout).strip().splitlines()[-3:]
            return f"exit code {result.returncode}: {' | '.join(diagnostics)}".rstrip(": ")
        return None


def adapter_from_config(
    adapter: AdapterConfig, params: Optional[EpidemicParams] = None
) -> SimulatorAdapter:
    """Creates the adapter described by the ``adapter`` config section."""
    if adapter.kind == "external":
        return ExternalAdapter(adapter.command or "", params=params)
    return BuiltinAdapter(params)


def parse_adapter_option(option: str, params: Optional[EpidemicParams] = None) -> SimulatorAdapter:
    """
    Interprets the ``--adapter`` command-line value.

    Args:
        option: ``builtin`` or an external command template
        params: Model parameters of the simulated world

    Returns:
        SimulatorAdapter
    """
    if option.strip() == "builtin":
        return BuiltinAdapter(params)
    return ExternalAdapter(option, params=params)


def run_builtin_task(
    params: EpidemicParams, task: SimulationTask, stop_on_extinction: bool, out_dir: Path
) -> TaskOutcome:
    """
    Simulates one task and writes its trajectory, retrying once on failure.

    Returns:
        (task id, None on success or the failure reason)
    """
    reason: Optional[str] = None
    for _ in range(ATTEMPTS):
        try:
            trajectory = run_simulation(
                params.with_assignment(task.assignment),
                seed=task.seed,
                final_step=task.final_step,
                stop_on_extinction=stop_on_extinction,
                task_id=task.task_id,
                point_index=task.point_index,
            )
            write_trajectory(trajectory, out_dir)
            return task.task_id, None
        except ConfigError as e:
            return task.task_id, str(e)
        except SweepError as e:
            reason = str(e)
        except Exception as e:
            reason = f"{type(e).__name__}: {e}"
    return task.task_id, reason


def resume(
    plan: ExperimentPlan,
    out_dir: Union[str, Path],
    params: Optional[EpidemicParams] = None,
) -> List[int]:
    """
    Lists the tasks that still need to run.

    Args:
        plan: Experiment plan
        out_dir: Directory holding ``task-<id>.csv`` files
        params: Model parameters, needed to accept outputs that stopped
            early on extinction

    Returns:
        Task ids without a complete, parseable trajectory, ascending
    """
    out_dir = Path(out_dir)
    stop = plan.config.stop_on_extinction
    return [
        task.task_id
        for task in plan.tasks
        if not task_complete(task, out_dir, stop, params)
    ]


def run_local(
    plan: ExperimentPlan,
    adapter: SimulatorAdapter,
    workers: int,
    out_dir: Union[str, Path],
    progress: Optional[ProgressCallback] = None,
) -> RunReport:
    """
    Runs every unfinished task of a plan on at most ``workers`` workers.

    Finished tasks (see ``resume``) are skipped. A failing task is retried
    once, then recorded; it never aborts the run.

    Args:
        plan: Experiment plan
        adapter: Simulator adapter
        workers: Maximum number of tasks (or chunks for external adapters)
            in flight
        out_dir: Output directory of the trajectories
        progress: Called with 1 every time a task finishes

    Returns:
        RunReport

    Raises:
        ConfigError: If ``workers`` < 1 or the adapter cannot run this plan
        SweepIOError: If ``out_dir`` is not writable
    """
    if workers < 1:
        raise ConfigError("must be >= 1", field="workers", value=workers)
    adapter.check(plan)
    out_dir = ensure_directory(out_dir)

    started = time.perf_counter()
    pending_ids = set(resume(plan, out_dir, adapter.params))
    tasks = [task for task in plan.tasks if task.task_id in pending_ids]
    report = RunReport(tasks_skipped=len(plan.tasks) - len(tasks))
    logger.info(
        "Running %d task(s) with %d worker(s), %d already complete",
        len(tasks),
        workers,
        report.tasks_skipped,
    )

    for task_id, reason in adapter.execute(tasks, plan.config, workers, out_dir, progress):
        report.record(task_id, reason)
        if reason is not None:
            logger.warning("Task %d failed: %s", task_id, reason)

    report.failures.sort()
    report.wall_clock = time.perf_counter() - started
    return report


def run_chunk(
    chunk: Chunk,
    params: EpidemicParams,
    config: ExplorationConfig,
    out_dir: Union[str, Path],
    workers: int = 1,
) -> RunReport:
    """
    Runs the unfinished tasks of one chunk with the built-in model.

    This is the body of the ``exec-chunk`` command used by SLURM array tasks.
    """
    out_dir = ensure_directory(out_dir)
    started = time.perf_counter()
    tasks = [
        task
        for task in chunk.tasks
        if not task_complete(task, out_dir, config.stop_on_extinction, params)
    ]
    report = RunReport(tasks_skipped=len(chunk.tasks) - len(tasks))
    for task_id, reason in BuiltinAdapter(params).execute(tasks, config, workers, out_dir):
        report.record(task_id, reason)
    report.failures.sort()
    report.wall_clock = time.perf_counter() - started
    return report


def default_workers() -> int:
    """``SWEEP_WORKERS`` when set, otherwise every available core."""
    value = os.environ.get("SWEEP_WORKERS")
    if value:
        try:
            return max(1, int(value))
        except ValueError as e:
            raise ConfigError("must be an integer", field="SWEEP_WORKERS", value=value) from e
    return os.cpu_count() or 1


def _group_by_chunk(tasks: Iterable[SimulationTask], tasks_per_chunk: int) -> List[Chunk]:
    groups: Dict[int, List[SimulationTask]] = {}
    for task in tasks:
        groups.setdefault(task.task_id // tasks_per_chunk, []).append(task)
    return [
        Chunk(chunk_id=chunk_id, tasks=tuple(group))
        for chunk_id, group in sorted(groups.items())
    ]


def _bounded(
    executor: Executor,
    submit: Callable[[object], Future],
    items: Iterable,
    window: int,
) -> Iterator:
    """Yields results while keeping at most ``window`` submissions queued."""
    iterator = iter(items)
    in_flight = {submit(item) for item in itertools.islice(iterator, window)}
    while in_flight:
        done, in_flight = wait(in_flight, return_when=FIRST_COMPLETED)
        for future in done:
            yield future.result()
            # refill
            for item in itertools.islice(iterator, 1):
                in_flight.add(submit(item))


def _advance(progress: Optional[ProgressCallback]) -> None:
    if progress is not None:
        progress(1)
