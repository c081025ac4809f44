"""
Tests for trajectory CSV files.
"""

import numpy as np
import pytest

from param_sweep.exceptions import TrajectoryFormatError
from param_sweep.refmodel import run_simulation
from param_sweep.trajectory import (
    COLUMNS,
    Trajectory,
    is_complete,
    read_trajectory,
    trajectory_file_name,
    write_trajectory,
)

HEADER = (
    "step,susceptible,recovered,presymptomatic,asymptomatic,symptomatic,hospitalized,icu,deaths"
)


def constant_trajectory(task_id=0, length=3, susceptible=10, active=0):
    rows = np.zeros((length, len(COLUMNS)), dtype=np.int64)
    rows[:, 0] = np.arange(length)
    rows[:, 1] = susceptible
    rows[:, COLUMNS.index("symptomatic")] = active
    return Trajectory(task_id=task_id, rows=rows)


class TestTrajectoryFiles:
    """Tests for writing and reading trajectories."""

    def test_header_and_line_endings(self, tmp_path):
        """Files start with the header and use LF line endings."""
        path = write_trajectory(constant_trajectory(task_id=4), tmp_path)
        assert path.name == "task-4.csv"
        raw = path.read_bytes()
        assert raw.startswith(HEADER.encode() + b"\n")
        assert b"\r" not in raw
        assert raw.endswith(b"\n")
        assert raw.count(b"\n") == 4

    def test_simulation_round_trip(self, tmp_path, small_params):
        """A simulated trajectory reads back unchanged."""
        trajectory = run_simulation(small_params, seed=1, final_step=40, task_id=2)
        path = write_trajectory(trajectory, tmp_path)
        assert read_trajectory(path).same_data(trajectory)

    def test_task_id_from_file_name(self, tmp_path):
        """The task id comes from the file name unless given."""
        path = write_trajectory(constant_trajectory(task_id=12), tmp_path)
        assert read_trajectory(path).task_id == 12
        assert read_trajectory(path, task_id=3, point_index=1).point_index == 1

    def test_truncated_file(self, tmp_path):
        """A last line without line feed is rejected."""
        path = write_trajectory(constant_trajectory(), tmp_path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(TrajectoryFormatError, match="line feed"):
            read_trajectory(path)

    def test_wrong_header(self, tmp_path):
        """An unexpected header is reported on line 1."""
        path = tmp_path / trajectory_file_name(0)
        path.write_text("step,infected\n0,1\n", encoding="utf-8")
        with pytest.raises(TrajectoryFormatError) as exc_info:
            read_trajectory(path)
        assert exc_info.value.line == 1

    def test_header_only(self, tmp_path):
        """A header without rows is rejected."""
        path = tmp_path / trajectory_file_name(0)
        path.write_text(HEADER + "\n", encoding="utf-8")
        with pytest.raises(TrajectoryFormatError, match="no rows"):
            read_trajectory(path)

    def test_non_integer_values(self, tmp_path):
        """Fractional counts are rejected."""
        path = tmp_path / trajectory_file_name(0)
        path.write_text(HEADER + "\n0,1.5,0,0,0,0,0,0,0\n", encoding="utf-8")
        with pytest.raises(TrajectoryFormatError, match="Non-integer"):
            read_trajectory(path)

    def test_step_gap(self, tmp_path):
        """Steps must be consecutive from 0."""
        path = tmp_path / trajectory_file_name(0)
        path.write_text(HEADER + "\n0,1,0,0,0,0,0,0,0\n2,1,0,0,0,0,0,0,0\n", encoding="utf-8")
        with pytest.raises(TrajectoryFormatError, match="Steps"):
            read_trajectory(path)

    def test_bad_file_name(self, tmp_path):
        """File names must be task-<id>.csv."""
        path = tmp_path / "output.csv"
        path.write_text(HEADER + "\n", encoding="utf-8")
        with pytest.raises(TrajectoryFormatError, match="file name"):
            read_trajectory(path)


class TestIsComplete:
    """Tests for output completeness checks."""

    def test_full_length(self, tmp_path):
        """A trajectory reaching the final step is complete."""
        path = write_trajectory(constant_trajectory(length=5, active=2), tmp_path)
        assert is_complete(path, final_step=5, stop_on_extinction=False)
        assert not is_complete(path, final_step=6, stop_on_extinction=False)

    def test_early_stop_without_active_infections(self, tmp_path):
        """A short trajectory ending extinct and accounting for everyone is complete."""
        path = write_trajectory(constant_trajectory(length=3), tmp_path)
        assert is_complete(path, final_step=10, stop_on_extinction=True, population=10)
        assert not is_complete(path, final_step=10, stop_on_extinction=False, population=10)

    def test_early_stop_with_latent_agents_left(self, tmp_path):
        """Agents missing from the last row are latent, so the run was cut short."""
        path = write_trajectory(constant_trajectory(length=3), tmp_path)
        assert not is_complete(path, final_step=10, stop_on_extinction=True, population=12)

    def test_early_stop_needs_population(self, tmp_path):
        """Without a population a short trajectory is never complete."""
        path = write_trajectory(constant_trajectory(length=3), tmp_path)
        assert not is_complete(path, final_step=10, stop_on_extinction=True)

    def test_early_stop_with_active_infections(self, tmp_path):
        """A short trajectory still holding infections is not complete."""
        path = write_trajectory(constant_trajectory(length=3, active=1), tmp_path)
        assert not is_complete(path, final_step=10, stop_on_extinction=True, population=11)

    def test_missing_or_malformed(self, tmp_path):
        """Absent and unparseable files are not complete."""
        assert not is_complete(tmp_path / "task-0.csv", final_step=1, stop_on_extinction=False)
        path = tmp_path / "task-1.csv"
        path.write_text("garbage", encoding="utf-8")
        assert not is_complete(path, final_step=1, stop_on_extinction=False)
