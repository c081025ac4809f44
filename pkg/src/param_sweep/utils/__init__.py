"""
Shared helpers: logging, file system operations and template filters.
"""

from .logger import setup_logger, get_logger, set_log_level
from .helpers import atomic_write_text, ensure_directory, validate_file_path

__all__ = [
    "setup_logger",
    "get_logger",
    "set_log_level",
    "atomic_write_text",
    "ensure_directory",
    "validate_file_path",
]
