"""
File system helpers shared by the plan, runner and report stages.
"""

import hashlib
import os
from pathlib import Path
from typing import Union

from ..exceptions import SweepIOError


def validate_file_path(file_path: Union[str, Path]) -> Path:
    """
    Checks that a path points to an existing regular file.

    Args:
        file_path: Path to check

    Returns:
        Path: The validated path

    Raises:
        SweepIOError: If the file does not exist or is not a file
    """
    path = Path(file_path)

    if not path.exists():
        raise SweepIOError("File not found", path)

    if not path.is_file():
        raise SweepIOError("Path is not a file", path)

    return path


def ensure_directory(directory_path: Union[str, Path]) -> Path:
    """
    Creates a directory (and parents) if needed and checks it is writable.

    Args:
        directory_path: Directory path

    Returns:
        Path: The directory

    Raises:
        SweepIOError: If the directory cannot be created or written to
    """
    if directory_path is None or str(directory_path) == "":
        raise SweepIOError("Empty directory path")

    path = Path(directory_path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SweepIOError(f"Cannot create directory: {e.strerror or e}", path) from e

    if not os.access(path, os.W_OK | os.X_OK):
        raise SweepIOError("Directory is not writable", path)

    return path


def atomic_write_text(file_path: Union[str, Path], content: str) -> Path:
    """
    Writes text through a temporary sibling file renamed into place.

    A reader never observes a partially written file under the final name.

    Args:
        file_path: Destination path
        content: Text to write (written as UTF-8 with LF line endings)

    Returns:
        Path: Destination path

    Raises:
        SweepIOError: On any write or rename failure
    """
    path = Path(file_path)
    tmp_path = temporary_sibling(path)
    try:
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        os.replace(tmp_path, path)
    except OSError as e:
        tmp_path.unlink(missing_ok=True)
        raise SweepIOError(f"Cannot write file: {e.strerror or e}", path) from e
    return path


def temporary_sibling(path: Path) -> Path:
    """Returns a hidden, process-unique temporary name next to ``path``."""
    return path.with_name(f".{path.name}.{os.getpid()}.tmp")


def digest_directory(directory_path: Union[str, Path], pattern: str = "*") -> str:
    """
    Computes a SHA-256 digest over file names and contents of a directory.

    Files are visited in sorted name order, so the digest only depends on
    what is on disk.

    Args:
        directory_path: Directory to digest
        pattern: Glob pattern of files to include

    Returns:
        str: Hex digest
    """
    digest = hashlib.sha256()
    for path in sorted(Path(directory_path).glob(pattern)):
        if not path.is_file():
            continue
        digest.update(path.name.encode("utf-8"))
        digest.update(b"\0")
        digest.update(path.read_bytes())
        digest.update(b"\0")
    return digest.hexdigest()


def resolve_relative(base_dir: Union[str, Path], target: Union[str, Path]) -> Path:
    """
    Resolves ``target`` against ``base_dir`` unless it is already absolute.

    Args:
        base_dir: Directory relative paths are anchored to
        target: Path to resolve

    Returns:
        Path: Absolute path
    """
    target_path = Path(target)
    if target_path.is_absolute():
        return target_path
    return (Path(base_dir) / target_path).resolve()
