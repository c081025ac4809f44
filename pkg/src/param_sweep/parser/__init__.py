"""
Readers for sweep inputs: config files and chunk plan files.
"""

from .config_parser import ConfigParser, resolve_paths
from .plan_reader import parse_chunk_xml
from .validator import ConfigValidator, ValidationResult

__all__ = [
    "ConfigParser",
    "ConfigValidator",
    "ValidationResult",
    "parse_chunk_xml",
    "resolve_paths",
]
