"""
Exceptions raised by param-sweep.

Every error carries a human-readable message plus the structured context
(path, field, element, task ids) needed to point the user at the problem.
"""

from typing import Any, Iterable, List, Optional


class SweepError(Exception):
    """Base class for all param-sweep errors."""

    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class ConfigError(SweepError):
    """Invalid configuration value or misconfigured adapter."""

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        self.field = field
        self.value = value
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class PlanError(SweepError):
    """Experiment plan cannot be built or chunked."""


class SweepIOError(SweepError):
    """File system failure while reading or writing an artifact."""

    def __init__(self, message: str, path: Any = None):
        self.path = path
        if path is not None:
            message = f"{message} ({path})"
        super().__init__(message)


class FormatError(SweepError):
    """Artifact on disk does not follow its schema."""

    def __init__(
        self,
        message: str,
        path: Any = None,
        line: Optional[int] = None,
        element: Optional[str] = None,
    ):
        self.path = path
        self.line = line
        self.element = element

        context = []
        if path is not None:
            context.append(str(path))
        if line is not None:
            context.append(f"line {line}")
        if element:
            context.append(element)
        if context:
            message = f"{message} [{', '.join(context)}]"
        super().__init__(message)


class PlanFormatError(FormatError):
    """Malformed chunk XML file."""


class TrajectoryFormatError(FormatError):
    """Malformed or incomplete trajectory CSV file."""


class DataError(SweepError):
    """Aggregation input is empty, inconsistent or incomplete."""


class MissingOutputsError(DataError):
    """Task outputs required by the report stage are missing."""

    def __init__(self, task_ids: Iterable[int], limit: int = 20):
        self.task_ids: List[int] = sorted(task_ids)
        shown = ", ".join(str(task_id) for task_id in self.task_ids[:limit])
        if len(self.task_ids) > limit:
            shown += f", ... ({len(self.task_ids) - limit} more)"
        super().__init__(f"Missing outputs for {len(self.task_ids)} task(s): {shown}")


class SweepEnvironmentError(SweepError):
    """A required external executable is not available."""

    def __init__(self, executable: str):
        self.executable = executable
        super().__init__(f"Executable '{executable}' not found on PATH")


class SubmitError(SweepError):
    """The scheduler rejected a submission."""

    def __init__(self, message: str, returncode: Optional[int] = None, diagnostics: str = ""):
        self.returncode = returncode
        self.diagnostics = diagnostics
        if diagnostics:
            message = f"{message}: {diagnostics.strip()}"
        super().__init__(message)
