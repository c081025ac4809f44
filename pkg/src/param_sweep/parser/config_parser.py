"""
Config file reader.

A sweep is configured by one JSON document with the sections
``exploration``, ``parameters``, ``model``, ``slurm`` and ``adapter``.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

from ..exceptions import ConfigError, SweepIOError
from ..models import BUILTIN_MODEL, SweepConfig
from ..utils.helpers import resolve_relative, validate_file_path
from ..utils.logger import get_logger
from .validator import ConfigValidator

logger = get_logger(__name__)


class ConfigParser:
    """
    Loads, validates and normalizes sweep config files.

    Relative paths in the config (``exploration.modelSource`` and
    ``slurm.workDir``) are resolved against the config file's directory.
    """

    def __init__(self) -> None:
        self.logger = logger
        self.validator = ConfigValidator()

    def parse_file(self, file_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Reads a JSON config document.

        Args:
            file_path: Path to the config file

        Returns:
            The decoded document

        Raises:
            ConfigError: If the path is not a readable file or is not valid JSON
        """
        try:
            file_path = validate_file_path(file_path)
        except SweepIOError as e:
            raise ConfigError(f"Config file unusable: {e}") from e

        try:
            text = file_path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config file {file_path}: {e.strerror or e}") from e

        data = self.parse_string(text)
        self.logger.info("Loaded config file %s", file_path)
        return data

    def parse_string(self, json_string: str) -> Dict[str, Any]:
        """
        Decodes a JSON config document.

        Raises:
            ConfigError: If the text is not valid JSON
        """
        try:
            return json.loads(json_string)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e

    def load(self, file_path: Union[str, Path]) -> SweepConfig:
        """
        Loads a config file into a validated ``SweepConfig``.

        Args:
            file_path: Path to the config file

        Returns:
            SweepConfig: Validated config with resolved paths

        Raises:
            ConfigError: With the dotted path of the first offending field
        """
        file_path = Path(file_path)
        config = self.validator.build(self.parse_file(file_path))
        return resolve_paths(config, file_path.resolve().parent)


def resolve_paths(config: SweepConfig, base_dir: Union[str, Path]) -> SweepConfig:
    """Anchors relative config paths to ``base_dir``."""
    exploration = config.exploration
    if exploration.model_source != BUILTIN_MODEL:
        exploration = exploration.model_copy(
            update={"model_source": str(resolve_relative(base_dir, exploration.model_source))}
        )

    slurm = config.slurm
    if slurm.work_dir is not None:
        slurm = slurm.model_copy(
            update={"work_dir": str(resolve_relative(base_dir, slurm.work_dir))}
        )

    return config.model_copy(update={"exploration": exploration, "slurm": slurm})
