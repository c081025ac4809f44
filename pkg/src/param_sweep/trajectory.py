"""
Per-simulation indicator time series and their CSV form.

A trajectory file is ``task-<taskId>.csv`` with the header
``step,susceptible,recovered,presymptomatic,asymptomatic,symptomatic,hospitalized,icu,deaths``
and one row per recorded step.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .exceptions import SweepIOError, TrajectoryFormatError
from .models import EpidemicParams
from .plan import SimulationTask
from .utils.helpers import temporary_sibling

INDICATORS = (
    "susceptible",
    "recovered",
    "presymptomatic",
    "asymptomatic",
    "symptomatic",
    "hospitalized",
    "icu",
    "deaths",
)
COLUMNS = ("step",) + INDICATORS
ACTIVE_INDICATORS = ("presymptomatic", "asymptomatic", "symptomatic", "hospitalized", "icu")


@dataclass(eq=False)
class Trajectory:
    """
    Indicator counts of one simulation, one row per step.

    ``rows`` has one column per entry of ``COLUMNS``. ``latent`` holds the
    latent count per step when the trajectory comes from the built-in model;
    it is not part of the CSV.
    """

    task_id: int
    rows: np.ndarray
    point_index: int = 0
    latent: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    @property
    def steps(self) -> np.ndarray:
        return self.rows[:, 0]

    def series(self, indicator: str) -> np.ndarray:
        return self.rows[:, COLUMNS.index(indicator)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=list(COLUMNS))

    def same_data(self, other: "Trajectory") -> bool:
        return self.task_id == other.task_id and np.array_equal(self.rows, other.rows)


def trajectory_file_name(task_id: int) -> str:
    return f"task-{task_id}.csv"


def write_trajectory(trajectory: Trajectory, directory: Union[str, Path]) -> Path:
    """
    Writes a trajectory CSV under its final name via an atomic rename.

    Args:
        trajectory: Trajectory to write
        directory: Output directory (must exist)

    Returns:
        Path: Written file

    Raises:
        SweepIOError: If the file cannot be written
    """
    path = Path(directory) / trajectory_file_name(trajectory.task_id)
    tmp_path = temporary_sibling(path)
    try:
        trajectory.to_frame().to_csv(tmp_path, index=False, lineterminator="\n")
        os.replace(tmp_path, path)
    except OSError as e:
        tmp_path.unlink(missing_ok=True)
        raise SweepIOError(f"Cannot write trajectory: {e.strerror or e}", path) from e
    return path


def read_trajectory(
    path: Union[str, Path], task_id: Optional[int] = None, point_index: int = 0
) -> Trajectory:
    """
    Reads and validates a trajectory CSV.

    Args:
        path: CSV file
        task_id: Task id; parsed from the file name when omitted
        point_index: Point the task belongs to

    Returns:
        Trajectory

    Raises:
        TrajectoryFormatError: If the file is missing, truncated or malformed
    """
    path = Path(path)
    if task_id is None:
        task_id = _task_id_from_name(path)

    try:
        raw = path.read_bytes()
    except OSError as e:
        raise TrajectoryFormatError(f"Cannot read trajectory: {e.strerror or e}", path=path) from e

    if not raw.endswith(b"\n"):
        raise TrajectoryFormatError("File does not end with a line feed", path=path)

    header = raw.split(b"\n", 1)[0].decode("utf-8", errors="replace")
    if header != ",".join(COLUMNS):
        raise TrajectoryFormatError(f"Unexpected header '{header}'", path=path, line=1)

    try:
        frame = pd.read_csv(path)
    except (ValueError, pd.errors.ParserError) as e:
        raise TrajectoryFormatError(f"Cannot parse trajectory: {e}", path=path) from e

    if frame.empty:
        raise TrajectoryFormatError("Trajectory has no rows", path=path)
    for column in COLUMNS:
        if not pd.api.types.is_integer_dtype(frame[column]):
            raise TrajectoryFormatError(f"Non-integer values in column '{column}'", path=path)

    rows = frame[list(COLUMNS)].to_numpy(dtype=np.int64)
    if not np.array_equal(rows[:, 0], np.arange(len(rows))):
        raise TrajectoryFormatError("Steps are not 0, 1, 2, ...", path=path)
    if (rows[:, 1:] < 0).any():
        raise TrajectoryFormatError("Negative indicator count", path=path)

    return Trajectory(task_id=task_id, rows=rows, point_index=point_index)


def is_complete(
    path: Union[str, Path],
    final_step: int,
    stop_on_extinction: bool,
    population: Optional[int] = None,
) -> bool:
    """
    Decides whether a task output can be trusted as finished.

    A finished trajectory parses, and either has ``final_step`` rows or (with
    early stopping) ends in a row without active infections whose indicators
    account for the whole ``population``. Latent agents are not exported, so
    a shorter output is never complete when the population is unknown.

    Args:
        path: Trajectory CSV
        final_step: Step limit of the task
        stop_on_extinction: Whether the task may stop early
        population: Number of agents of the task's world

    Returns:
        bool: True if the output is complete
    """
    try:
        trajectory = read_trajectory(path, task_id=-1)
    except TrajectoryFormatError:
        return False

    if len(trajectory) == final_step:
        return True
    if not stop_on_extinction or population is None or len(trajectory) > final_step:
        return False
    last = trajectory.rows[-1]
    if any(last[COLUMNS.index(name)] != 0 for name in ACTIVE_INDICATORS):
        return False
    # no latent agents left
    return int(last[1:].sum()) == population


def task_complete(
    task: SimulationTask,
    out_dir: Union[str, Path],
    stop_on_extinction: bool,
    params: Optional[EpidemicParams] = None,
) -> bool:
    """
    Whether ``task`` already has a finished trajectory in ``out_dir``.

    The population of the task's world comes from its assignment or from
    ``params``; without either, only full-length outputs count as finished.
    """
    path = Path(out_dir) / trajectory_file_name(task.task_id)
    if not path.is_file():
        return False
    population = task.assignment.get("population")
    if population is None and params is not None:
        population = params.population
    return is_complete(
        path,
        task.final_step,
        stop_on_extinction,
        None if population is None else int(population),
    )


def _task_id_from_name(path: Path) -> int:
    stem = path.stem
    if not stem.startswith("task-"):
        raise TrajectoryFormatError("Not a trajectory file name", path=path)
    try:
        return int(stem[len("task-") :])
    except ValueError as e:
        raise TrajectoryFormatError("Not a trajectory file name", path=path) from e
