"""
Base class of the template-driven artifact generators.

Chunk plan files, SLURM scripts and SVG figures are all rendered from Jinja2
templates under ``param_sweep/templates``.
"""

from abc import ABC
from pathlib import Path
from typing import Any, Union

from jinja2 import Environment, FileSystemLoader, StrictUndefined, select_autoescape

from ..utils.helpers import atomic_write_text, ensure_directory
from ..utils.logger import get_logger
from ..utils.template_filters import FILTERS

logger = get_logger(__name__)

TEMPLATE_DIR = Path(__file__).parent.parent / "templates"


class BaseGenerator(ABC):
    """
    Shared template engine setup and file output for generators.

    Subclasses render a named template; output is deterministic for a given
    context (no timestamps, LF line endings).
    """

    def __init__(self) -> None:
        self.logger = logger
        self._setup_template_engine()

    def _setup_template_engine(self) -> None:
        """Configures Jinja2 and registers the custom filters."""
        self.template_engine = Environment(
            loader=FileSystemLoader(str(TEMPLATE_DIR)),
            autoescape=select_autoescape(
                enabled_extensions=("xml.j2", "svg.j2"),
                default_for_string=False,
                default=False,
            ),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            undefined=StrictUndefined,
        )

        for name, filter_func in FILTERS.items():
            self.template_engine.filters[name] = filter_func

    def render(self, template_name: str, **context: Any) -> str:
        """
        Renders a template.

        Args:
            template_name: Path of the template relative to the template directory
            **context: Template variables

        Returns:
            Rendered text
        """
        template = self.template_engine.get_template(template_name)
        return template.render(**context)

    def create_output_directory(self, output_dir: Union[str, Path]) -> Path:
        """
        Creates the output directory if needed.

        Raises:
            SweepIOError: If the directory cannot be created or is not writable
        """
        return ensure_directory(output_dir)

    def write_file(self, file_path: Path, content: str) -> Path:
        """
        Writes a generated file atomically.

        Raises:
            SweepIOError: If the file cannot be written
        """
        atomic_write_text(file_path, content)
        self.logger.debug("Wrote %s", file_path)
        return file_path
