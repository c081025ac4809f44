"""
Configuration models.

Every value that configures a sweep is an immutable pydantic model:
the swept parameters, the exploration settings, the built-in epidemic model
parameters, the SLURM settings and the simulator adapter.
"""

import math
from typing import Any, Dict, Literal, Mapping, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveInt,
    StrictFloat,
    StrictInt,
    StrictStr,
    ValidationError,
    field_validator,
    model_validator,
)
from pydantic.alias_generators import to_camel

from .exceptions import ConfigError

Scalar = Union[StrictInt, StrictFloat, StrictStr]

IDENTIFIER_PATTERN = r"^[A-Za-z_][A-Za-z0-9_]*$"
JOB_NAME_PATTERN = r"^[A-Za-z0-9_][A-Za-z0-9_.-]*$"

BUILTIN_MODEL = "builtin"


class _FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class _CamelModel(BaseModel):
    """Model read from camelCase JSON keys, accessed with snake_case names."""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        alias_generator=to_camel,
        populate_by_name=True,
        protected_namespaces=(),
    )


class ContinuousDomain(_FrozenModel):
    """``count`` evenly spaced values from ``min`` to ``max`` inclusive."""

    kind: Literal["continuous"] = "continuous"
    min: float = Field(allow_inf_nan=False)
    max: float = Field(allow_inf_nan=False)
    count: PositiveInt

    @model_validator(mode="after")
    def _check_bounds(self) -> "ContinuousDomain":
        if self.min > self.max:
            raise ValueError(f"min ({self.min}) must not exceed max ({self.max})")
        return self

    def cardinality(self) -> int:
        return self.count


class DiscreteDomain(_FrozenModel):
    """An explicit ordered list of values."""

    kind: Literal["discrete"] = "discrete"
    values: Tuple[Scalar, ...]

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: Tuple[Scalar, ...]) -> Tuple[Scalar, ...]:
        if not values:
            raise ValueError("values must not be empty")
        seen = []
        for value in values:
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"value {value!r} is not finite")
            if value in seen:
                raise ValueError(f"duplicate value {value!r}")
            seen.append(value)
        return values

    def cardinality(self) -> int:
        return len(self.values)


class ParameterSpec(_FrozenModel):
    """
    One swept parameter.

    In a config file a spec is written flat, either
    ``{"name", "min", "max", "count"}`` or ``{"name", "values"}``.
    """

    name: str = Field(min_length=1, pattern=IDENTIFIER_PATTERN)
    domain: Union[ContinuousDomain, DiscreteDomain] = Field(discriminator="kind")

    @model_validator(mode="before")
    @classmethod
    def _fold_flat_form(cls, data: Any) -> Any:
        if not isinstance(data, Mapping) or "domain" in data:
            return data
        data = dict(data)
        if "values" in data:
            domain = {"kind": "discrete", "values": data.pop("values")}
        else:
            domain = {"kind": "continuous"}
            for key in ("min", "max", "count"):
                if key in data:
                    domain[key] = data.pop(key)
        data["domain"] = domain
        return data

    @classmethod
    def continuous(cls, name: str, min: float, max: float, count: int) -> "ParameterSpec":
        return cls(name=name, domain=ContinuousDomain(min=min, max=max, count=count))

    @classmethod
    def discrete(cls, name: str, values: Any) -> "ParameterSpec":
        return cls(name=name, domain=DiscreteDomain(values=tuple(values)))

    def cardinality(self) -> int:
        return self.domain.cardinality()

    def to_flat(self) -> Dict[str, Any]:
        """Returns the config-file form of the spec."""
        if isinstance(self.domain, DiscreteDomain):
            return {"name": self.name, "values": list(self.domain.values)}
        return {
            "name": self.name,
            "min": self.domain.min,
            "max": self.domain.max,
            "count": self.domain.count,
        }


class ExplorationConfig(_CamelModel):
    """Settings shared by every simulation of an exploration."""

    experiment_name: str = Field(pattern=IDENTIFIER_PATTERN)
    model_source: str = BUILTIN_MODEL
    replications: PositiveInt
    final_step: PositiveInt
    start_seed: NonNegativeInt = 0
    tasks_per_chunk: PositiveInt = 8
    stop_on_extinction: bool = False


class EpidemicParams(_FrozenModel):
    """
    Parameters of the built-in SEIR model with building contamination.

    Field names are the names a sweep uses to address them.
    """

    basic_viral_release: float = Field(default=0.05, ge=0.0, allow_inf_nan=False)
    basic_viral_decrease: float = Field(default=0.1, ge=0.0, le=1.0)
    direct_transmission_prob: float = Field(default=0.05, ge=0.0, le=1.0)
    env_infection_factor: float = Field(default=0.5, ge=0.0, allow_inf_nan=False)
    population: PositiveInt = 500
    n_buildings: PositiveInt = 50
    initial_infected: NonNegativeInt = 5
    latent_hours: int = Field(default=48, ge=1)
    presymptomatic_hours: int = Field(default=24, ge=1)
    infectious_hours: int = Field(default=168, ge=1)
    hospital_hours: int = Field(default=120, ge=1)
    icu_hours: int = Field(default=120, ge=1)
    p_asymptomatic: float = Field(default=0.3, ge=0.0, le=1.0)
    p_hospitalize: float = Field(default=0.2, ge=0.0, le=1.0)
    p_icu: float = Field(default=0.3, ge=0.0, le=1.0)
    p_die: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_initial_infected(self) -> "EpidemicParams":
        if self.initial_infected > self.population:
            raise ValueError(
                f"initial_infected ({self.initial_infected}) exceeds population "
                f"({self.population})"
            )
        return self

    def with_assignment(self, assignment: Mapping[str, Scalar]) -> "EpidemicParams":
        """
        Returns a copy with swept parameter values applied.

        Args:
            assignment: Parameter name to value

        Returns:
            EpidemicParams: Validated copy

        Raises:
            ConfigError: If a name is not a model parameter or a value is invalid
        """
        unknown = sorted(set(assignment) - set(type(self).model_fields))
        if unknown:
            raise ConfigError(
                f"not a parameter of the built-in model: {', '.join(unknown)}",
                field="parameters",
            )
        try:
            return type(self).model_validate({**self.model_dump(), **dict(assignment)})
        except ValidationError as e:
            error = e.errors()[0]
            field = ".".join(str(part) for part in error["loc"]) or None
            raise ConfigError(error["msg"], field=field) from e


class SlurmConfig(_CamelModel):
    """Resources requested from SLURM for the array job."""

    job_timeout_hours: PositiveInt = 1
    cores_per_node: PositiveInt = 1
    nodes: PositiveInt = 1
    max_submission: PositiveInt = 1
    job_name: str = Field(default="param_sweep", pattern=JOB_NAME_PATTERN)
    work_dir: Optional[str] = None
    extra_directives: Tuple[str, ...] = ()


class AdapterConfig(_CamelModel):
    """How simulations are executed: the built-in model or an external command."""

    kind: Literal["builtin", "external"] = "builtin"
    command: Optional[str] = None

    @model_validator(mode="after")
    def _check_command(self) -> "AdapterConfig":
        if self.kind == "external" and not self.command:
            raise ValueError("an external adapter needs a command")
        return self


class SweepConfig(_FrozenModel):
    """A complete config file."""

    exploration: ExplorationConfig
    parameters: Tuple[ParameterSpec, ...] = ()
    model: EpidemicParams = EpidemicParams()
    slurm: SlurmConfig = SlurmConfig()
    adapter: AdapterConfig = AdapterConfig()

    @field_validator("parameters")
    @classmethod
    def _check_unique_names(
        cls, parameters: Tuple[ParameterSpec, ...]
    ) -> Tuple[ParameterSpec, ...]:
        names = [spec.name for spec in parameters]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"duplicate parameter names: {', '.join(duplicates)}")
        return parameters
