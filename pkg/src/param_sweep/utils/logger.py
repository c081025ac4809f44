"""
Logging setup for param-sweep.

All modules log through children of the single ``param_sweep`` logger.
Records go to stderr so that command output on stdout stays parseable.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

_logger: Optional[logging.Logger] = None

ROOT_LOGGER_NAME = "param_sweep"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(
    level: int = logging.WARNING,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
) -> None:
    """
    Configures the package root logger once per process.

    Args:
        level: Logging level
        log_file: Optional path of a log file written in addition to stderr
        format_string: Log record format
    """
    global _logger

    if _logger is not None:
        return

    _logger = logging.getLogger(ROOT_LOGGER_NAME)
    _logger.setLevel(level)
    _logger.propagate = False
    _logger.handlers.clear()

    formatter = logging.Formatter(format_string or DEFAULT_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    _logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        _logger.addHandler(file_handler)


def get_logger(name: str) -> logging.Logger:
    """
    Returns the logger of a module.

    Args:
        name: Module name (``__name__``)

    Returns:
        logging.Logger: Child of the package root logger
    """
    if _logger is None:
        setup_logger()

    if name == ROOT_LOGGER_NAME or name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def set_log_level(level: int) -> None:
    """
    Changes the level of the root logger and all its handlers.

    Args:
        level: New logging level
    """
    if _logger is None:
        setup_logger(level)
        return

    _logger.setLevel(level)
    for handler in _logger.handlers:
        handler.setLevel(level)
