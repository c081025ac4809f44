"""
SLURM batch artifact generator.

A plan becomes one array job: ``job.sbatch`` runs array task ``k`` on the
chunk listed on line ``k`` of ``chunks.manifest``. Generation never talks to
the scheduler.
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

from ..exceptions import PlanError
from ..models import SlurmConfig
from .base import BaseGenerator

TEMPLATE = "slurm/job.sbatch.j2"
SCRIPT_NAME = "job.sbatch"
MANIFEST_NAME = "chunks.manifest"
LOGS_DIR = "logs"

_CHUNK_FILE = re.compile(r"^plan-(\d+)\.xml$")


@dataclass(frozen=True)
class SbatchFiles:
    """The generated SLURM artifacts."""

    script: Path
    manifest: Path
    logs_dir: Path
    n_chunks: int

    @property
    def directory(self) -> Path:
        return self.script.parent


class SbatchGenerator(BaseGenerator):
    """Renders ``job.sbatch`` and ``chunks.manifest``."""

    def render_manifest(self, chunk_files: Sequence[Tuple[int, Path]]) -> str:
        return "".join(f"{chunk_id}\t{path}\n" for chunk_id, path in chunk_files)

    def render_script(
        self, n_chunks: int, slurm: SlurmConfig, command: str, manifest: Path
    ) -> str:
        """
        Renders the array job script.

        Args:
            n_chunks: Number of array tasks
            slurm: Requested resources
            command: Shell command run for the chunk in ``$XML``
            manifest: Path of the chunk manifest

        Returns:
            Script text
        """
        return self.render(
            TEMPLATE,
            job_name=slurm.job_name,
            n_chunks=n_chunks,
            max_submission=slurm.max_submission,
            timeout_hours=slurm.job_timeout_hours,
            nodes=slurm.nodes,
            cores=slurm.cores_per_node,
            extra_directives=[_directive_line(d) for d in slurm.extra_directives],
            manifest=manifest,
            command=command,
        )

    def prepare_sbatch(
        self,
        chunk_paths: Sequence[Union[str, Path]],
        slurm: SlurmConfig,
        command: str,
        directory: Union[str, Path],
    ) -> SbatchFiles:
        """
        Writes the manifest, the script and the log directory.

        Args:
            chunk_paths: Chunk plan files ``plan-<k>.xml``, k = 0..n-1
            slurm: Requested resources
            command: Adapter command for one chunk (see ``batch_command``)
            directory: Output directory of the artifacts

        Returns:
            SbatchFiles

        Raises:
            PlanError: If there is no chunk or chunk ids are not 0..n-1
            SweepIOError: If the files cannot be written
        """
        chunk_files = _numbered(chunk_paths)
        output_dir = self.create_output_directory(directory)
        logs_dir = self.create_output_directory(output_dir / LOGS_DIR)

        manifest = self.write_file(output_dir / MANIFEST_NAME, self.render_manifest(chunk_files))
        script = self.write_file(
            output_dir / SCRIPT_NAME,
            self.render_script(len(chunk_files), slurm, command, manifest.resolve()),
        )
        script.chmod(0o755)

        self.logger.info("Prepared array job of %d chunk(s) in %s", len(chunk_files), output_dir)
        return SbatchFiles(
            script=script, manifest=manifest, logs_dir=logs_dir, n_chunks=len(chunk_files)
        )


def _numbered(chunk_paths: Sequence[Union[str, Path]]) -> List[Tuple[int, Path]]:
    if not chunk_paths:
        raise PlanError("Cannot prepare a SLURM job without chunks")

    numbered = []
    for path in chunk_paths:
        path = Path(path)
        match = _CHUNK_FILE.match(path.name)
        if match is None:
            raise PlanError(f"Not a chunk plan file: {path}")
        numbered.append((int(match.group(1)), path.resolve()))
    numbered.sort()

    ids = [chunk_id for chunk_id, _ in numbered]
    if ids != list(range(len(ids))):
        raise PlanError("Chunk ids must be 0..n-1 without gaps")
    return numbered


def _directive_line(directive: str) -> str:
    directive = directive.strip()
    return directive if directive.startswith("#") else f"#SBATCH {directive}"


def prepare_sbatch(
    chunk_paths: Sequence[Union[str, Path]],
    slurm: SlurmConfig,
    command: str,
    directory: Union[str, Path],
) -> SbatchFiles:
    return SbatchGenerator().prepare_sbatch(chunk_paths, slurm, command, directory)
