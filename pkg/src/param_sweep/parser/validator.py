"""
Config validation.

Validation runs in two layers: a JSON Schema check of the document shape
that collects every error with its field path, then construction of the
pydantic models, which enforces the cross-field rules.
"""

from dataclasses import dataclass
from typing import Any, Dict, List

from jsonschema import Draft202012Validator
from pydantic import ValidationError

from ..exceptions import ConfigError
from ..models import IDENTIFIER_PATTERN, JOB_NAME_PATTERN, SweepConfig
from ..utils.logger import get_logger

logger = get_logger(__name__)

_SCALAR = {"type": ["number", "string"]}

CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["exploration"],
    "additionalProperties": False,
    "properties": {
        "exploration": {
            "type": "object",
            "required": ["experimentName", "replications", "finalStep"],
            "additionalProperties": False,
            "properties": {
                "experimentName": {"type": "string", "pattern": IDENTIFIER_PATTERN},
                "modelSource": {"type": "string", "minLength": 1},
                "replications": {"type": "integer", "minimum": 1},
                "finalStep": {"type": "integer", "minimum": 1},
                "startSeed": {"type": "integer", "minimum": 0},
                "tasksPerChunk": {"type": "integer", "minimum": 1},
                "stopOnExtinction": {"type": "boolean"},
            },
        },
        "parameters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {"type": "string", "pattern": IDENTIFIER_PATTERN},
                    "min": {"type": "number"},
                    "max": {"type": "number"},
                    "count": {"type": "integer", "minimum": 1},
                    "values": {"type": "array", "minItems": 1, "items": _SCALAR},
                },
                "additionalProperties": False,
                "oneOf": [
                    {"required": ["min", "max", "count"], "not": {"required": ["values"]}},
                    {"required": ["values"], "not": {"anyOf": [
                        {"required": ["min"]}, {"required": ["max"]}, {"required": ["count"]},
                    ]}},
                ],
            },
        },
        "model": {"type": "object"},
        "slurm": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "jobTimeoutHours": {"type": "integer", "minimum": 1},
                "coresPerNode": {"type": "integer", "minimum": 1},
                "nodes": {"type": "integer", "minimum": 1},
                "maxSubmission": {"type": "integer", "minimum": 1},
                "jobName": {"type": "string", "pattern": JOB_NAME_PATTERN},
                "workDir": {"type": "string", "minLength": 1},
                "extraDirectives": {"type": "array", "items": {"type": "string"}},
            },
        },
        "adapter": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["builtin", "external"]},
                "command": {"type": "string", "minLength": 1},
            },
        },
    },
}


@dataclass
class ValidationResult:
    """Outcome of validating a config document."""

    is_valid: bool
    parameter_count: int
    errors: List[str]
    fields: List[str]


class ConfigValidator:
    """Validates config documents and builds ``SweepConfig`` objects."""

    def __init__(self) -> None:
        self.schema_validator = Draft202012Validator(CONFIG_SCHEMA)

    def validate(self, document: Any) -> ValidationResult:
        """
        Checks a decoded config document without raising.

        Args:
            document: Decoded JSON document

        Returns:
            ValidationResult: Every error found, with field paths
        """
        errors: List[str] = []
        fields: List[str] = []

        schema_errors = sorted(
            self.schema_validator.iter_errors(document), key=lambda e: list(e.absolute_path)
        )
        for error in schema_errors:
            field = _dotted(error.absolute_path)
            fields.append(field)
            errors.append(f"{field or '<root>'}: {error.message}")

        if not errors:
            try:
                SweepConfig.model_validate(document)
            except ValidationError as e:
                for error in e.errors():
                    field = _dotted(error["loc"])
                    fields.append(field)
                    errors.append(f"{field or '<root>'}: {error['msg']}")

        parameters = document.get("parameters", []) if isinstance(document, dict) else []
        parameter_count = len(parameters) if isinstance(parameters, list) else 0
        return ValidationResult(len(errors) == 0, parameter_count, errors, fields)

    def build(self, document: Any) -> SweepConfig:
        """
        Validates a document and returns the config it describes.

        Raises:
            ConfigError: For the first error, carrying its field path
        """
        result = self.validate(document)
        if not result.is_valid:
            for message in result.errors:
                logger.debug("Config error: %s", message)
            first = result.errors[0]
            field = result.fields[0] or None
            raise ConfigError(first.split(": ", 1)[1], field=field)
        return SweepConfig.model_validate(document)


def _dotted(path: Any) -> str:
    return ".".join(str(part) for part in path)
