"""
Report artifacts: SVG figures and CSV exports of aggregated results.

File names follow a fixed scheme inside the report directory:
``point-<idx>-summary.csv``, ``point-<idx>-timeseries.svg``,
``grid-<indicator>.csv``, ``grid-<indicator>.svg`` and ``points.csv``.
"""

import re
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .aggregate import GRID_INDICATORS, STATISTICS, GridSummary, PointSummary, ReplicationSummary
from .exceptions import DataError, SweepIOError
from .generators.svg import SVGGenerator
from .models import ParameterSpec, Scalar
from .plan import enumerate_values
from .trajectory import INDICATORS
from .utils.helpers import atomic_write_text, temporary_sibling
from .utils.logger import get_logger
from .utils.template_filters import scalar_text

logger = get_logger(__name__)

SUMMARY_COLUMNS = ("step", "indicator") + STATISTICS
POINT_COLUMNS = ("pointIndex",)
_GRID_FILE = re.compile(r"^grid-(\w+)\.csv$")


def summary_file_name(point_index: int) -> str:
    return f"point-{point_index}-summary.csv"


def timeseries_file_name(point_index: int) -> str:
    return f"point-{point_index}-timeseries.svg"


def grid_file_name(indicator: str, suffix: str = "csv") -> str:
    return f"grid-{indicator}.{suffix}"


def render_timeseries(
    summary: ReplicationSummary, title: str, width: int = 1200, height: int = 900
) -> str:
    """Renders the eight-panel quartile figure of one point as SVG text."""
    return SVGGenerator().render_timeseries(summary, title, width=width, height=height)


def render_heatmap(grid: GridSummary, title: str, width: int = 700, height: int = 600) -> str:
    """Renders a two-parameter grid as an SVG heatmap."""
    return SVGGenerator().render_heatmap(grid, title, width=width, height=height)


def write_svg(document: str, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, document)


def _write_frame(frame: pd.DataFrame, path: Union[str, Path], **kwargs) -> Path:
    path = Path(path)
    tmp_path = temporary_sibling(path)
    try:
        frame.to_csv(tmp_path, lineterminator="\n", **kwargs)
        tmp_path.replace(path)
    except OSError as e:
        tmp_path.unlink(missing_ok=True)
        raise SweepIOError(f"Cannot write CSV: {e.strerror or e}", path) from e
    logger.debug("Wrote %s", path)
    return path


def export_summary_csv(summary: ReplicationSummary, path: Union[str, Path]) -> Path:
    """
    Writes ``step,indicator,min,q1,median,q3,max``, one row per indicator and step.

    Raises:
        SweepIOError: If the file cannot be written
    """
    return _write_frame(summary.to_frame(), path, index=False)


def read_summary_csv(
    path: Union[str, Path], point_index: int = 0, replication_count: int = 0
) -> ReplicationSummary:
    """
    Reads a summary CSV back.

    Raises:
        SweepIOError: If the file cannot be read
        DataError: If the content does not follow the summary schema
    """
    frame = _read_frame(path)
    if tuple(frame.columns) != SUMMARY_COLUMNS:
        raise DataError(f"Unexpected summary columns in {path}: {list(frame.columns)}")

    bands = {}
    for indicator in INDICATORS:
        rows = frame[frame["indicator"] == indicator]
        rows = rows.assign(step=rows["step"].astype(int)).sort_values("step")
        bands[indicator] = rows[list(STATISTICS)].to_numpy(dtype=np.float64)
    if len({band.shape[0] for band in bands.values()}) != 1:
        raise DataError(f"Indicators of {path} have different lengths")
    return ReplicationSummary(
        point_index=point_index, assignment={}, bands=bands, replication_count=replication_count
    )


def export_grid_csv(grid: GridSummary, path: Union[str, Path]) -> Path:
    """
    Writes a grid: the header row holds the x values, the first column the y values.

    The top-left cell is ``<yParam>\\<xParam>``. Values use their shortest
    round-trip text form.

    Raises:
        SweepIOError: If the file cannot be written
    """
    frame = pd.DataFrame(
        [[scalar_text(float(value)) for value in row] for row in grid.cells],
        index=pd.Index(
            [scalar_text(y) for y in grid.y_values], name=f"{grid.y_param}\\{grid.x_param}"
        ),
        columns=[scalar_text(x) for x in grid.x_values],
    )
    return _write_frame(frame, path)


def read_grid_csv(
    path: Union[str, Path],
    indicator: str = "",
    x_spec: Optional[ParameterSpec] = None,
    y_spec: Optional[ParameterSpec] = None,
) -> GridSummary:
    """
    Reads a grid CSV written by ``export_grid_csv``.

    Axis labels are matched against the values of ``x_spec``/``y_spec`` when
    given, so string values keep their type. Without a spec, labels that
    look like numbers are read back as numbers.

    Args:
        path: Grid CSV
        indicator: Indicator name; taken from ``grid-<indicator>.csv`` when empty
        x_spec: Parameter swept along the columns
        y_spec: Parameter swept along the rows

    Returns:
        GridSummary

    Raises:
        SweepIOError: If the file cannot be read
        DataError: If the content is not a grid
    """
    path = Path(path)
    if not indicator:
        match = _GRID_FILE.match(path.name)
        indicator = match.group(1) if match else "deaths"

    frame = _read_frame(path)
    corner = str(frame.columns[0])
    if "\\" not in corner:
        raise DataError(f"Grid corner cell must be '<y>\\<x>' in {path}")
    y_param, x_param = corner.split("\\", 1)

    try:
        cells = tuple(
            tuple(float(value) for value in row)
            for row in frame.iloc[:, 1:].itertuples(index=False)
        )
    except ValueError as e:
        raise DataError(f"Non-numeric grid cell in {path}") from e

    return GridSummary(
        x_param=x_param,
        y_param=y_param,
        x_values=_axis_values([str(x) for x in frame.columns[1:]], x_spec, path),
        y_values=_axis_values([str(y) for y in frame.iloc[:, 0]], y_spec, path),
        cells=cells,
        indicator=indicator,
    )


def export_points_csv(
    summaries: Sequence[PointSummary], parameter_names: Sequence[str], path: Union[str, Path]
) -> Path:
    """
    Writes one row per point: its index, parameter values and scalar medians.

    Raises:
        SweepIOError: If the file cannot be written
    """
    records = []
    for summary in summaries:
        record = {"pointIndex": summary.point_index}
        record.update({name: summary.assignment.get(name) for name in parameter_names})
        record.update({name: summary.value(name) for name in GRID_INDICATORS})
        records.append(record)
    columns = list(POINT_COLUMNS) + list(parameter_names) + list(GRID_INDICATORS)
    return _write_frame(pd.DataFrame(records, columns=columns), path, index=False)


def export_csv(result: Union[ReplicationSummary, GridSummary], path: Union[str, Path]) -> Path:
    """
    Exports a replication summary or a grid to CSV.

    Raises:
        SweepIOError: If the file cannot be written
        TypeError: For any other object
    """
    if isinstance(result, ReplicationSummary):
        return export_summary_csv(result, path)
    if isinstance(result, GridSummary):
        return export_grid_csv(result, path)
    raise TypeError(f"Cannot export {type(result).__name__} to CSV")


def _read_frame(path: Union[str, Path]) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise SweepIOError("File not found", path) from e
    except OSError as e:
        raise SweepIOError(f"Cannot read CSV: {e.strerror or e}", path) from e
    except (ValueError, pd.errors.ParserError) as e:
        raise DataError(f"Cannot parse {path}: {e}") from e


def _parse_scalar(text: str) -> Scalar:
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _axis_values(
    labels: Sequence[str], spec: Optional[ParameterSpec], path: Path
) -> Tuple[Scalar, ...]:
    if spec is None:
        return tuple(_parse_scalar(label) for label in labels)
    by_label = {scalar_text(value): value for value in enumerate_values(spec)}
    unknown = [label for label in labels if label not in by_label]
    if unknown:
        raise DataError(f"Grid label '{unknown[0]}' is not a value of {spec.name} in {path}")
    return tuple(by_label[label] for label in labels)
