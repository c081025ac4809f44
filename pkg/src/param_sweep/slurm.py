"""
Submission of generated array jobs to SLURM.
"""

import re
import shutil
import subprocess
from pathlib import Path
from typing import Union

from .exceptions import SubmitError, SweepEnvironmentError
from .generators.sbatch import SbatchFiles
from .utils.logger import get_logger

logger = get_logger(__name__)

SBATCH = "sbatch"

_JOB_ID = re.compile(r"Submitted batch job (\S+)")


def run_slurm(files: Union[SbatchFiles, str, Path], executable: str = SBATCH) -> str:
    """
    Submits ``job.sbatch`` from its own directory.

    Args:
        files: Generated artifacts, or the path of the script
        executable: Submission command looked up on PATH

    Returns:
        The job id printed by the scheduler

    Raises:
        SweepEnvironmentError: If the submission command is not on PATH
        SubmitError: If the submission exits nonzero or prints no job id
    """
    script = files.script if isinstance(files, SbatchFiles) else Path(files)
    command = shutil.which(executable)
    if command is None:
        raise SweepEnvironmentError(executable)

    logger.info("Submitting %s with %s", script, command)
    try:
        result = subprocess.run(
            [command, script.name],
            cwd=script.parent,
            capture_output=True,
            text=True,
        )
    except OSError as e:
        raise SubmitError(f"Cannot run {executable}", diagnostics=str(e)) from e

    if result.returncode != 0:
        raise SubmitError(
            f"{executable} exited with code {result.returncode}",
            returncode=result.returncode,
            diagnostics=result.stderr or result.stdout,
        )

    match = _JOB_ID.search(result.stdout)
    if match is None:
        raise SubmitError(
            f"{executable} did not report a job id", returncode=0, diagnostics=result.stdout
        )

    job_id = match.group(1)
    logger.info("Submitted job %s", job_id)
    return job_id
