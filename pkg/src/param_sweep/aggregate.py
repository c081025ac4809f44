"""
Replication aggregation.

Raw trajectories of one parameter point are aligned to a common length and
reduced, step by step, to five order statistics per indicator. Scalar
summaries of every point (median deaths, median last death day, median peak
hospitalizations) form the two-parameter grids shown as heatmaps.

Quantiles use linear interpolation between order statistics: ``q(p)`` is
read at fractional index ``p * (n - 1)`` of the sorted sample.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import DataError, MissingOutputsError
from .models import EpidemicParams, ParameterSpec, Scalar
from .plan import ExperimentPlan, enumerate_values
from .trajectory import (
    COLUMNS,
    INDICATORS,
    Trajectory,
    read_trajectory,
    task_complete,
    trajectory_file_name,
)
from .utils.logger import get_logger

logger = get_logger(__name__)

STATISTICS = ("min", "q1", "median", "q3", "max")
PROBABILITIES = (0.0, 0.25, 0.5, 0.75, 1.0)
STEPS_PER_DAY = 24

GRID_INDICATORS = {
    "deaths": "median_total_deaths",
    "lastDeathDay": "median_last_death_day",
    "peakHospitalized": "median_peak_hospitalized",
}


@dataclass(frozen=True, eq=False)
class ReplicationSummary:
    """
    Per-step statistics of every indicator at one parameter point.

    ``bands`` maps each indicator to an array of shape ``(steps, 5)`` whose
    columns follow ``STATISTICS``.
    """

    point_index: int
    assignment: Dict[str, Scalar]
    bands: Dict[str, np.ndarray]
    replication_count: int

    @property
    def n_steps(self) -> int:
        return int(next(iter(self.bands.values())).shape[0])

    def band(self, indicator: str) -> np.ndarray:
        return self.bands[indicator]

    def to_frame(self) -> pd.DataFrame:
        """Long-format table ``step,indicator,min,q1,median,q3,max``, indicator-major."""
        steps = np.arange(self.n_steps)
        frames = []
        for indicator in INDICATORS:
            frame = pd.DataFrame(self.bands[indicator], columns=list(STATISTICS))
            frame.insert(0, "indicator", indicator)
            frame.insert(0, "step", steps)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    def same_data(self, other: "ReplicationSummary") -> bool:
        return (
            self.point_index == other.point_index
            and self.replication_count == other.replication_count
            and all(np.array_equal(self.bands[i], other.bands[i]) for i in INDICATORS)
        )


@dataclass(frozen=True)
class PointSummary:
    """Scalar outcomes of one point, each the median over replications."""

    point_index: int
    assignment: Dict[str, Scalar]
    median_total_deaths: float
    median_last_death_day: float
    median_peak_hospitalized: float

    def value(self, indicator: str) -> float:
        """Looks up a scalar by its grid indicator name."""
        if indicator not in GRID_INDICATORS:
            raise DataError(f"Unknown grid indicator '{indicator}'")
        return getattr(self, GRID_INDICATORS[indicator])


@dataclass(frozen=True)
class GridSummary:
    """
    One scalar indicator over a two-parameter grid.

    ``cells[j][i]`` is the value at ``(x_values[i], y_values[j])``.
    """

    x_param: str
    y_param: str
    x_values: Tuple[Scalar, ...]
    y_values: Tuple[Scalar, ...]
    cells: Tuple[Tuple[float, ...], ...]
    indicator: str = field(default="deaths")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.y_values), len(self.x_values)

    def matrix(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=np.float64).reshape(self.shape)


def align_trajectories(trajectories: Sequence[Trajectory]) -> Dict[str, np.ndarray]:
    """
    Extends every trajectory to the longest one by repeating its final row.

    Args:
        trajectories: Trajectories to align (left unmodified)

    Returns:
        Indicator name to a ``(replications, max_len)`` matrix

    Raises:
        DataError: If the list is empty
    """
    if not trajectories:
        raise DataError("Cannot align an empty list of trajectories")
    length = max(len(trajectory) for trajectory in trajectories)

    padded = []
    for trajectory in trajectories:
        if len(trajectory) == 0:
            raise DataError(f"Trajectory of task {trajectory.task_id} is empty")
        padded.append(
            np.pad(trajectory.rows, ((0, length - len(trajectory)), (0, 0)), mode="edge")
        )
    stacked = np.stack(padded)
    return {
        indicator: stacked[:, :, COLUMNS.index(indicator)] for indicator in INDICATORS
    }


def quantiles5(
    values: Union[Sequence[float], np.ndarray]
) -> Tuple[float, float, float, float, float]:
    """
    Computes ``(min, q1, median, q3, max)`` of a sample.

    Args:
        values: Non-empty sample

    Returns:
        The five statistics, as floats

    Raises:
        DataError: If the sample is empty or not finite
    """
    sample = np.asarray(values, dtype=np.float64).ravel()
    if sample.size == 0:
        raise DataError("Cannot compute quantiles of an empty sample")
    if not np.isfinite(sample).all():
        raise DataError("Sample contains non-finite values")
    result = np.quantile(sample, PROBABILITIES, method="linear")
    return tuple(float(value) for value in result)  # type: ignore[return-value]


def quantile_bands(matrix: np.ndarray) -> np.ndarray:
    """Column-wise ``quantiles5`` of a ``(replications, steps)`` matrix, as ``(steps, 5)``."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        raise DataError("Cannot compute quantiles of an empty sample")
    return np.quantile(matrix, PROBABILITIES, axis=0, method="linear").T


def _check_point(trajectories: Sequence[Trajectory]) -> int:
    if not trajectories:
        raise DataError("No trajectories to summarize")
    points = sorted({trajectory.point_index for trajectory in trajectories})
    if len(points) > 1:
        raise DataError(f"Trajectories belong to several points: {points}")
    return points[0]


def summarize_point(
    trajectories: Sequence[Trajectory], assignment: Optional[Mapping[str, Scalar]] = None
) -> ReplicationSummary:
    """
    Reduces the replications of one point to per-step statistics.

    Args:
        trajectories: Replications of a single point
        assignment: Parameter values of the point

    Returns:
        ReplicationSummary

    Raises:
        DataError: If the list is empty or mixes points
    """
    point_index = _check_point(trajectories)
    aligned = align_trajectories(trajectories)
    return ReplicationSummary(
        point_index=point_index,
        assignment=dict(assignment or {}),
        bands={indicator: quantile_bands(aligned[indicator]) for indicator in INDICATORS},
        replication_count=len(trajectories),
    )


def total_deaths(trajectory: Trajectory) -> int:
    return int(trajectory.series("deaths")[-1])


def last_death_day(trajectory: Trajectory) -> int:
    """Day of the last step at which cumulative deaths increased, 0 without deaths."""
    increases = np.flatnonzero(np.diff(trajectory.series("deaths"), prepend=0) > 0)
    if increases.size == 0:
        return 0
    return int(increases[-1]) // STEPS_PER_DAY


def peak_hospitalized(trajectory: Trajectory) -> int:
    return int(trajectory.series("hospitalized").max())


def summarize_scalars(
    trajectories: Sequence[Trajectory], assignment: Optional[Mapping[str, Scalar]] = None
) -> PointSummary:
    """
    Computes the median scalar outcomes of one point.

    Raises:
        DataError: If the list is empty or mixes points
    """
    point_index = _check_point(trajectories)

    def median(values: List[int]) -> float:
        return float(np.quantile(np.asarray(values, dtype=np.float64), 0.5, method="linear"))

    return PointSummary(
        point_index=point_index,
        assignment=dict(assignment or {}),
        median_total_deaths=median([total_deaths(t) for t in trajectories]),
        median_last_death_day=median([last_death_day(t) for t in trajectories]),
        median_peak_hospitalized=median([peak_hospitalized(t) for t in trajectories]),
    )


def build_grid(
    summaries: Sequence[PointSummary],
    x_spec: ParameterSpec,
    y_spec: ParameterSpec,
    indicator: str = "deaths",
) -> GridSummary:
    """
    Arranges point summaries of a two-parameter sweep into a grid.

    Args:
        summaries: One summary per point
        x_spec: Parameter on the x axis
        y_spec: Parameter on the y axis
        indicator: ``deaths``, ``lastDeathDay`` or ``peakHospitalized``

    Returns:
        GridSummary with axes in enumeration order

    Raises:
        DataError: If a point sweeps other parameters, a cell is missing or
            the indicator is unknown
    """
    if indicator not in GRID_INDICATORS:
        raise DataError(f"Unknown grid indicator '{indicator}'")
    axes = {x_spec.name, y_spec.name}
    if len(axes) != 2:
        raise DataError("A grid needs two distinct parameters")

    cells_by_key: Dict[Tuple[Scalar, Scalar], float] = {}
    for summary in summaries:
        if set(summary.assignment) != axes:
            raise DataError(
                "A grid needs exactly two swept parameters, point "
                f"{summary.point_index} sweeps {sorted(summary.assignment)}"
            )
        key = (summary.assignment[x_spec.name], summary.assignment[y_spec.name])
        cells_by_key[key] = summary.value(indicator)

    x_values = tuple(enumerate_values(x_spec))
    y_values = tuple(enumerate_values(y_spec))
    missing = [
        f"{x_spec.name}={x}, {y_spec.name}={y}"
        for y in y_values
        for x in x_values
        if (x, y) not in cells_by_key
    ]
    if missing:
        raise DataError(f"Missing grid cells: {'; '.join(missing)}")

    return GridSummary(
        x_param=x_spec.name,
        y_param=y_spec.name,
        x_values=x_values,
        y_values=y_values,
        cells=tuple(tuple(cells_by_key[(x, y)] for x in x_values) for y in y_values),
        indicator=indicator,
    )


def find_missing_outputs(
    plan: ExperimentPlan,
    out_dir: Union[str, Path],
    params: Optional[EpidemicParams] = None,
) -> List[int]:
    """Ids of the plan tasks without a complete trajectory file, as ``runner.resume``."""
    stop = plan.config.stop_on_extinction
    return [task.task_id for task in plan.tasks if not task_complete(task, out_dir, stop, params)]


def load_point(
    plan: ExperimentPlan,
    point_index: int,
    out_dir: Union[str, Path],
    params: Optional[EpidemicParams] = None,
) -> List[Trajectory]:
    """
    Reads the replications of one point.

    Raises:
        MissingOutputsError: If a replication file is absent or incomplete
    """
    out_dir = Path(out_dir)
    tasks = plan.point_tasks(point_index)
    stop = plan.config.stop_on_extinction
    missing = [task.task_id for task in tasks if not task_complete(task, out_dir, stop, params)]
    if missing:
        raise MissingOutputsError(missing)
    return [
        read_trajectory(
            out_dir / trajectory_file_name(task.task_id),
            task_id=task.task_id,
            point_index=point_index,
        )
        for task in tasks
    ]


def iter_points(
    plan: ExperimentPlan,
    out_dir: Union[str, Path],
    params: Optional[EpidemicParams] = None,
) -> Iterator[Tuple[int, Dict[str, Scalar], List[Trajectory]]]:
    """
    Streams ``(point index, assignment, trajectories)`` one point at a time.

    Only one point's replications are held in memory.

    Raises:
        MissingOutputsError: Up front, naming every task without a complete
            output
    """
    missing = find_missing_outputs(plan, out_dir, params)
    if missing:
        raise MissingOutputsError(missing)
    for point_index in range(plan.n_points):
        logger.debug("Aggregating point %d", point_index)
        trajectories = load_point(plan, point_index, out_dir, params)
        yield point_index, plan.point_assignment(point_index), trajectories
