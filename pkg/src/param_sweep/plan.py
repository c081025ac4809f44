"""
Experiment space enumeration.

An exploration is the cartesian product of the swept parameter values
(row-major in declaration order, the last parameter varying fastest), crossed
with the replication indices. Replication ``r`` always uses seed
``start_seed + r``, so replications are seed-paired across the whole grid.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .exceptions import PlanError
from .models import ContinuousDomain, ExplorationConfig, ParameterSpec, Scalar
from .utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SimulationTask:
    """One simulation: a parameter assignment, a seed and a step limit."""

    task_id: int
    point_index: int
    replication_index: int
    assignment: Dict[str, Scalar]
    seed: int
    final_step: int


@dataclass(frozen=True)
class Chunk:
    """A contiguous batch of tasks serialized into one plan file."""

    chunk_id: int
    tasks: Tuple[SimulationTask, ...]

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def file_name(self) -> str:
        return chunk_file_name(self.chunk_id)


@dataclass(frozen=True)
class ExperimentPlan:
    """The full task list of an exploration, ordered by task id."""

    config: ExplorationConfig
    specs: Tuple[ParameterSpec, ...]
    tasks: Tuple[SimulationTask, ...]

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def n_points(self) -> int:
        return len(self.tasks) // self.config.replications

    @property
    def parameter_names(self) -> List[str]:
        return [spec.name for spec in self.specs]

    def point_tasks(self, point_index: int) -> Tuple[SimulationTask, ...]:
        """Returns the replications of one point, in replication order."""
        if not 0 <= point_index < self.n_points:
            raise IndexError(f"point index {point_index} out of range")
        start = point_index * self.config.replications
        return self.tasks[start : start + self.config.replications]

    def point_assignment(self, point_index: int) -> Dict[str, Scalar]:
        return dict(self.point_tasks(point_index)[0].assignment)


def chunk_file_name(chunk_id: int) -> str:
    return f"plan-{chunk_id}.xml"


def enumerate_values(spec: ParameterSpec) -> List[Scalar]:
    """
    Lists the values a parameter takes in the exploration.

    Continuous values are computed by index (``min + i * step``) and the last
    value is exactly ``max``; a count of 1 yields ``[min]``.

    Args:
        spec: Parameter spec

    Returns:
        Ordered values
    """
    domain = spec.domain
    if isinstance(domain, ContinuousDomain):
        return [float(value) for value in np.linspace(domain.min, domain.max, domain.count)]
    return list(domain.values)


def count_points(specs: Sequence[ParameterSpec]) -> int:
    """Number of points of the experiment space (1 when nothing is swept)."""
    return math.prod(spec.cardinality() for spec in specs)


def count_chunks(n_tasks: int, tasks_per_chunk: int) -> int:
    return -(-n_tasks // tasks_per_chunk)


def plan_cardinality(
    config: ExplorationConfig, specs: Sequence[ParameterSpec]
) -> Tuple[int, int, int]:
    """
    Computes the plan size without materializing tasks.

    Returns:
        (points, tasks, chunks)
    """
    points = count_points(specs)
    tasks = points * config.replications
    return points, tasks, count_chunks(tasks, config.tasks_per_chunk)


def _check_unique_names(specs: Iterable[ParameterSpec]) -> None:
    seen = set()
    for spec in specs:
        if spec.name in seen:
            raise PlanError(f"Duplicate parameter name: '{spec.name}'")
        seen.add(spec.name)


def point_assignments(specs: Sequence[ParameterSpec]) -> List[Dict[str, Scalar]]:
    """Enumerates the points of the experiment space in row-major order."""
    _check_unique_names(specs)
    names = [spec.name for spec in specs]
    value_lists = [enumerate_values(spec) for spec in specs]
    return [dict(zip(names, combination)) for combination in itertools.product(*value_lists)]


def build_plan(config: ExplorationConfig, specs: Sequence[ParameterSpec]) -> ExperimentPlan:
    """
    Builds the full task list of an exploration.

    Args:
        config: Exploration settings
        specs: Swept parameters, in declaration order

    Returns:
        ExperimentPlan: Deterministic plan, tasks ordered by task id

    Raises:
        PlanError: If two specs share a name
    """
    assignments = point_assignments(specs)
    replications = config.replications

    tasks = []
    for point_index, assignment in enumerate(assignments):
        for replication_index in range(replications):
            tasks.append(
                SimulationTask(
                    task_id=point_index * replications + replication_index,
                    point_index=point_index,
                    replication_index=replication_index,
                    assignment=dict(assignment),
                    seed=config.start_seed + replication_index,
                    final_step=config.final_step,
                )
            )

    logger.info(
        "Plan '%s': %d point(s), %d task(s)",
        config.experiment_name,
        len(assignments),
        len(tasks),
    )
    return ExperimentPlan(config=config, specs=tuple(specs), tasks=tuple(tasks))


def chunk_plan(plan: ExperimentPlan) -> List[Chunk]:
    """
    Splits a plan into contiguous chunks of ``tasks_per_chunk`` tasks.

    Args:
        plan: Experiment plan

    Returns:
        Chunks in task order; only the last one may be smaller

    Raises:
        PlanError: If the plan has no tasks
    """
    if not plan.tasks:
        raise PlanError("Cannot chunk an empty plan")

    size = plan.config.tasks_per_chunk
    return [
        Chunk(chunk_id=chunk_id, tasks=plan.tasks[start : start + size])
        for chunk_id, start in enumerate(range(0, len(plan.tasks), size))
    ]
