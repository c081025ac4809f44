"""
SVG figure generator.

Geometry is computed here; the templates only place the precomputed shapes.
Every coordinate is printed with two decimals, so a figure is a pure
function of its input data, title and size.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..aggregate import STATISTICS, GridSummary, ReplicationSummary
from ..utils.template_filters import interpolate_color
from .base import BaseGenerator

TIMESERIES_TEMPLATE = "svg/timeseries.svg.j2"
HEATMAP_TEMPLATE = "svg/heatmap.svg.j2"

PANEL_ROWS: Tuple[Tuple[str, ...], ...] = (
    ("susceptible", "recovered"),
    ("presymptomatic", "asymptomatic", "symptomatic"),
    ("hospitalized", "icu", "deaths"),
)

LOW_COLOR = "#f7fbff"
HIGH_COLOR = "#08306b"

TITLE_HEIGHT = 40.0
PANEL_GAP = 10.0
PLOT_PADDING = (55.0, 15.0, 28.0, 30.0)  # left, right, top, bottom

Point = Tuple[float, float]


@dataclass(frozen=True)
class Axis:
    """A linear map from data range ``[low, high]`` onto pixels ``[start, end]``."""

    low: float
    high: float
    start: float
    end: float

    def __call__(self, value: float) -> float:
        return self.start + (value - self.low) / (self.high - self.low) * (self.end - self.start)


@dataclass(frozen=True)
class Panel:
    indicator: str
    x: float
    y: float
    width: float
    height: float
    plot_x: float
    plot_y: float
    plot_width: float
    plot_height: float
    y_range: Tuple[float, float]
    x_range: Tuple[float, float]
    band: List[Point]
    lines: List[Tuple[str, List[Point]]]


@dataclass(frozen=True)
class Cell:
    x: float
    y: float
    width: float
    height: float
    color: str
    value: float
    text_color: str


def data_range(values: np.ndarray) -> Tuple[float, float]:
    """
    Axis range of a panel: from ``min(0, data minimum)`` to the data maximum.

    A degenerate range is widened to one unit above its lower bound.
    """
    low = min(0.0, float(values.min()))
    high = float(values.max())
    if high <= low:
        high = low + 1.0
    return low, high


class SVGGenerator(BaseGenerator):
    """Renders replication summaries and grids as SVG documents."""

    def render_timeseries(
        self, summary: ReplicationSummary, title: str, width: int = 1200, height: int = 900
    ) -> str:
        """
        Renders the eight indicator panels of one point.

        Args:
            summary: Per-step statistics of the point
            title: Figure title
            width: Document width in pixels
            height: Document height in pixels

        Returns:
            SVG text
        """
        row_height = (height - TITLE_HEIGHT) / len(PANEL_ROWS)
        panels = []
        for row, indicators in enumerate(PANEL_ROWS):
            panel_width = width / len(indicators)
            for column, indicator in enumerate(indicators):
                panels.append(
                    self._panel(
                        indicator,
                        summary.band(indicator),
                        column * panel_width,
                        TITLE_HEIGHT + row * row_height,
                        panel_width,
                        row_height,
                    )
                )

        return self.render(
            TIMESERIES_TEMPLATE,
            title=title,
            width=width,
            height=height,
            panels=panels,
            replications=summary.replication_count,
        )

    def _panel(
        self, indicator: str, band: np.ndarray, x: float, y: float, width: float, height: float
    ) -> Panel:
        # plot area inside the padding
        left, right, top, bottom = PLOT_PADDING
        plot_x = x + left
        plot_y = y + top
        plot_width = width - left - right - PANEL_GAP
        plot_height = height - top - bottom - PANEL_GAP

        # data to pixel scales; y grows downward
        steps = np.arange(band.shape[0], dtype=np.float64)
        x_range = (0.0, float(max(steps[-1], 1.0)))
        y_range = data_range(band)
        x_axis = Axis(*x_range, plot_x, plot_x + plot_width)
        y_axis = Axis(*y_range, plot_y + plot_height, plot_y)

        def series(column: int) -> List[Point]:
            return [(x_axis(s), y_axis(v)) for s, v in zip(steps, band[:, column])]

        # band polygon: max forward, then min backward
        low = series(STATISTICS.index("min"))
        high = series(STATISTICS.index("max"))
        return Panel(
            indicator=indicator,
            x=x,
            y=y,
            width=width,
            height=height,
            plot_x=plot_x,
            plot_y=plot_y,
            plot_width=plot_width,
            plot_height=plot_height,
            y_range=y_range,
            x_range=x_range,
            band=high + low[::-1],
            lines=[(name, series(STATISTICS.index(name))) for name in ("q1", "median", "q3")],
        )

    def render_heatmap(
        self, grid: GridSummary, title: str, width: int = 700, height: int = 600
    ) -> str:
        """
        Renders a grid as colored cells with value annotations and a legend.

        The color scale runs from the smallest to the largest cell value; when
        all cells are equal the legend spans ``[v, v + 1]``.

        Args:
            grid: Grid to draw; the first y value is at the bottom
            title: Figure title
            width: Document width in pixels
            height: Document height in pixels

        Returns:
            SVG text
        """
        matrix = grid.matrix()
        low, high = float(matrix.min()), float(matrix.max())
        if high <= low:
            high = low + 1.0

        plot_x, plot_y = 90.0, 50.0
        plot_width = width - plot_x - 120.0
        plot_height = height - plot_y - 80.0
        n_rows, n_columns = matrix.shape
        cell_width = plot_width / n_columns
        cell_height = plot_height / n_rows

        cells = []
        for j in range(n_rows):
            for i in range(n_columns):
                value = float(matrix[j, i])
                fraction = (value - low) / (high - low)
                cells.append(
                    Cell(
                        x=plot_x + i * cell_width,
                        y=plot_y + plot_height - (j + 1) * cell_height,
                        width=cell_width,
                        height=cell_height,
                        color=interpolate_color(LOW_COLOR, HIGH_COLOR, fraction),
                        value=value,
                        text_color="#ffffff" if fraction > 0.5 else "#000000",
                    )
                )

        return self.render(
            HEATMAP_TEMPLATE,
            title=title,
            width=width,
            height=height,
            grid=grid,
            cells=cells,
            plot_x=plot_x,
            plot_y=plot_y,
            plot_width=plot_width,
            plot_height=plot_height,
            x_ticks=_ticks(grid.x_values, plot_x, cell_width),
            y_ticks=_ticks(grid.y_values, plot_y + plot_height, -cell_height),
            legend_range=(low, high),
            low_color=LOW_COLOR,
            high_color=HIGH_COLOR,
        )


def _ticks(values: Sequence, origin: float, step: float) -> List[Tuple[float, object]]:
    return [(origin + (index + 0.5) * step, value) for index, value in enumerate(values)]
