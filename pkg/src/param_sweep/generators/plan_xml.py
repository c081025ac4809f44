"""
Chunk plan file generator.

Each chunk of an experiment plan becomes ``plan-<chunkId>.xml``, the input
file of one headless simulator invocation.
"""

from pathlib import Path
from typing import Iterable, List, Union

from ..models import ExplorationConfig
from ..plan import Chunk
from .base import BaseGenerator

TEMPLATE = "plan/chunk.xml.j2"


class PlanXMLGenerator(BaseGenerator):
    """Renders chunks to plan XML files."""

    def render_chunk(self, chunk: Chunk, config: ExplorationConfig) -> str:
        """
        Renders the XML document of a chunk.

        Args:
            chunk: Chunk to render
            config: Exploration settings (experiment name and model source)

        Returns:
            XML text
        """
        return self.render(
            TEMPLATE,
            tasks=chunk.tasks,
            experiment=config.experiment_name,
            source_path=config.model_source,
        )

    def write_chunk_xml(
        self, chunk: Chunk, config: ExplorationConfig, directory: Union[str, Path]
    ) -> Path:
        """
        Writes ``plan-<chunkId>.xml`` into a directory.

        Args:
            chunk: Chunk to write
            config: Exploration settings
            directory: Output directory, created if needed

        Returns:
            Path: Written file

        Raises:
            SweepIOError: If the directory or file cannot be written
        """
        output_path = self.create_output_directory(directory)
        return self.write_file(output_path / chunk.file_name, self.render_chunk(chunk, config))

    def write_chunks(
        self, chunks: Iterable[Chunk], config: ExplorationConfig, directory: Union[str, Path]
    ) -> List[Path]:
        paths = [self.write_chunk_xml(chunk, config, directory) for chunk in chunks]
        self.logger.info("Wrote %d plan file(s) to %s", len(paths), directory)
        return paths


def write_chunk_xml(chunk: Chunk, config: ExplorationConfig, directory: Union[str, Path]) -> Path:
    return PlanXMLGenerator().write_chunk_xml(chunk, config, directory)
