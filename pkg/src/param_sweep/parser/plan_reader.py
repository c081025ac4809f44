"""
Reader for chunk plan files, the inverse of the plan XML generator.
"""

import re
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Callable, Dict, List, Union

from ..exceptions import PlanFormatError
from ..models import Scalar
from ..plan import Chunk, SimulationTask

_CHUNK_FILE = re.compile(r"^plan-(\d+)\.xml$")

_VALUE_PARSERS: Dict[str, Callable[[str], Scalar]] = {
    "FLOAT": float,
    "INT": int,
    "STRING": str,
}


def parse_chunk_xml(path: Union[str, Path]) -> Chunk:
    """
    Reads a ``plan-<chunkId>.xml`` file back into a chunk.

    Args:
        path: Plan file

    Returns:
        Chunk: The chunk that was written to the file

    Raises:
        PlanFormatError: If the file is missing, not well-formed or does not
            follow the plan schema
    """
    path = Path(path)
    match = _CHUNK_FILE.match(path.name)
    if match is None:
        raise PlanFormatError("File name is not plan-<chunkId>.xml", path=path)

    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as e:
        line = e.position[0] if e.position else None
        raise PlanFormatError(f"Malformed XML: {e}", path=path, line=line) from e
    except OSError as e:
        raise PlanFormatError(f"Cannot read plan file: {e.strerror or e}", path=path) from e

    if root.tag != "Experiment_plan":
        raise PlanFormatError(
            f"Root element must be Experiment_plan, found {root.tag}", path=path, element=root.tag
        )

    tasks: List[SimulationTask] = []
    for index, simulation in enumerate(root):
        element = f"Simulation[{index}]"
        if simulation.tag != "Simulation":
            raise PlanFormatError(
                f"Unexpected element {simulation.tag}", path=path, element=element
            )
        tasks.append(_parse_simulation(simulation, path, element))

    return Chunk(chunk_id=int(match.group(1)), tasks=tuple(tasks))


def _parse_simulation(simulation: ET.Element, path: Path, element: str) -> SimulationTask:
    for attribute in ("experiment", "sourcePath"):
        _required(simulation, attribute, path, element)

    task_id = _integer(simulation, "id", path, element)
    seed = _integer(simulation, "seed", path, element)
    final_step = _integer(simulation, "finalStep", path, element, minimum=1)
    point_index = _integer(simulation, "pointIndex", path, element)
    replication_index = _integer(simulation, "replicationIndex", path, element)

    parameters = simulation.find("Parameters")
    if parameters is None:
        raise PlanFormatError("Missing Parameters element", path=path, element=element)

    assignment: Dict[str, Scalar] = {}
    for position, parameter in enumerate(parameters):
        context = f"{element}/Parameter[{position}]"
        if parameter.tag != "Parameter":
            raise PlanFormatError(f"Unexpected element {parameter.tag}", path=path, element=context)
        name = _required(parameter, "name", path, context)
        type_tag = _required(parameter, "type", path, context)
        text = _required(parameter, "value", path, context)
        if type_tag not in _VALUE_PARSERS:
            raise PlanFormatError(
                f"Unknown parameter type '{type_tag}'", path=path, element=context
            )
        if name in assignment:
            raise PlanFormatError(f"Duplicate parameter '{name}'", path=path, element=context)
        try:
            assignment[name] = _VALUE_PARSERS[type_tag](text)
        except ValueError as e:
            raise PlanFormatError(
                f"Value '{text}' is not a valid {type_tag}", path=path, element=context
            ) from e

    return SimulationTask(
        task_id=task_id,
        point_index=point_index,
        replication_index=replication_index,
        assignment=assignment,
        seed=seed,
        final_step=final_step,
    )


def _required(node: ET.Element, attribute: str, path: Path, element: str) -> str:
    value = node.get(attribute)
    if value is None:
        raise PlanFormatError(f"Missing attribute '{attribute}'", path=path, element=element)
    return value


def _integer(node: ET.Element, attribute: str, path: Path, element: str, minimum: int = 0) -> int:
    text = _required(node, attribute, path, element)
    if not re.fullmatch(r"\d+", text):
        raise PlanFormatError(
            f"Attribute '{attribute}' is not an integer: '{text}'", path=path, element=element
        )
    value = int(text)
    if value < minimum:
        raise PlanFormatError(
            f"Attribute '{attribute}' must be >= {minimum}", path=path, element=element
        )
    return value
