"""
Jinja2 filters used by the plan, SLURM and SVG templates.
"""

import shlex
from typing import Any, Sequence, Tuple, Union

from markupsafe import Markup

Scalar = Union[int, float, str]

_XML_ATTR_ESCAPES = {
    "&": "&amp;",
    "<": "&lt;",
    ">": "&gt;",
    '"': "&quot;",
    "'": "&#39;",
    "\t": "&#9;",
    "\n": "&#10;",
    "\r": "&#13;",
}


def xml_attr(value: Any) -> Markup:
    """
    Escapes a value for use inside a double-quoted XML attribute.

    Whitespace control characters are written as character references so
    that attribute value normalization does not alter them on parse.

    Args:
        value: Value to escape (converted with ``str``)

    Returns:
        Escaped markup
    """
    text = str(value)
    return Markup("".join(_XML_ATTR_ESCAPES.get(char, char) for char in text))


def scalar_type(value: Scalar) -> str:
    """
    Returns the plan type tag of a parameter value.

    Args:
        value: Parameter value

    Returns:
        ``FLOAT``, ``INT`` or ``STRING``
    """
    if isinstance(value, bool):
        raise TypeError("Boolean parameter values are not supported")
    if isinstance(value, int):
        return "INT"
    if isinstance(value, float):
        return "FLOAT"
    return "STRING"


def scalar_text(value: Scalar) -> str:
    """
    Serializes a parameter value.

    Floats use the shortest representation that round-trips (at most 17
    significant digits).

    Args:
        value: Parameter value

    Returns:
        Text form of the value
    """
    if isinstance(value, float):
        return repr(value)
    return str(value)


def slurm_time(hours: int) -> str:
    """
    Formats a whole number of hours as a SLURM ``HH:00:00`` time limit.

    Args:
        hours: Hours (>= 1)

    Returns:
        Zero-padded time limit
    """
    return f"{int(hours):02d}:00:00"


def shell_quote(value: Any) -> str:
    """Quotes a value as one POSIX shell word."""
    return shlex.quote(str(value))


def svg_num(value: float) -> str:
    """Formats an SVG coordinate with two decimals and no negative zero."""
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def svg_points(points: Sequence[Tuple[float, float]]) -> str:
    """Formats ``(x, y)`` pairs as an SVG ``points`` attribute."""
    return " ".join(f"{svg_num(x)},{svg_num(y)}" for x, y in points)


def value_label(value: float) -> str:
    """
    Formats a numeric value for annotations (at most four significant digits).

    Args:
        value: Number to format

    Returns:
        Short text label
    """
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return f"{value:.4g}"
    return str(value)


def hex_to_rgb(color: str) -> Tuple[int, int, int]:
    """Parses ``#rrggbb``."""
    color = color.lstrip("#")
    return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)


def interpolate_color(low: str, high: str, fraction: float) -> str:
    """
    Linearly interpolates between two ``#rrggbb`` colors.

    Args:
        low: Color at fraction 0
        high: Color at fraction 1
        fraction: Position in [0, 1] (clamped)

    Returns:
        Interpolated color as ``#rrggbb``
    """
    fraction = min(1.0, max(0.0, fraction))
    low_rgb = hex_to_rgb(low)
    high_rgb = hex_to_rgb(high)
    channels = (
        int(round(lo + (hi - lo) * fraction)) for lo, hi in zip(low_rgb, high_rgb)
    )
    return "#" + "".join(f"{channel:02x}" for channel in channels)


FILTERS = {
    "xml_attr": xml_attr,
    "scalar_type": scalar_type,
    "scalar_text": scalar_text,
    "slurm_time": slurm_time,
    "shell_quote": shell_quote,
    "svg_num": svg_num,
    "svg_points": svg_points,
    "value_label": value_label,
}
