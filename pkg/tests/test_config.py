"""
Tests for config models, validation and loading.
"""

import json

import pytest

from param_sweep.exceptions import ConfigError, SweepIOError
from param_sweep.models import (
    AdapterConfig,
    ContinuousDomain,
    DiscreteDomain,
    EpidemicParams,
    ExplorationConfig,
    ParameterSpec,
    SlurmConfig,
)
from param_sweep.parser import ConfigParser, ConfigValidator


class TestParameterSpec:
    """Tests for swept parameter specs."""

    def test_flat_continuous_form(self):
        """Flat min/max/count keys give a continuous domain."""
        spec = ParameterSpec.model_validate({"name": "a", "min": 0.0, "max": 1.0, "count": 3})
        assert isinstance(spec.domain, ContinuousDomain)
        assert spec.cardinality() == 3

    def test_flat_discrete_form(self):
        """A flat values list gives a discrete domain in order."""
        spec = ParameterSpec.model_validate({"name": "a", "values": [1, 2, "x"]})
        assert isinstance(spec.domain, DiscreteDomain)
        assert spec.domain.values == (1, 2, "x")
        assert spec.cardinality() == 3

    def test_to_flat(self):
        """Specs convert back to the flat document form."""
        assert ParameterSpec.continuous("a", 0.01, 0.1, 10).to_flat() == {
            "name": "a",
            "min": 0.01,
            "max": 0.1,
            "count": 10,
        }
        assert ParameterSpec.discrete("b", [0.5]).to_flat() == {"name": "b", "values": [0.5]}

    def test_min_above_max_rejected(self):
        """A min above max is rejected."""
        with pytest.raises(ValueError, match="must not exceed"):
            ParameterSpec.continuous("a", 1.0, 0.5, 2)

    def test_zero_count_rejected(self):
        """A zero count is rejected."""
        with pytest.raises(ValueError):
            ParameterSpec.continuous("a", 0.0, 1.0, 0)

    def test_duplicate_discrete_values_rejected(self):
        """Duplicate discrete values are rejected."""
        with pytest.raises(ValueError, match="duplicate"):
            ParameterSpec.discrete("a", [0.5, 0.5])

    def test_empty_discrete_values_rejected(self):
        """An empty values list is rejected."""
        with pytest.raises(ValueError):
            ParameterSpec.discrete("a", [])

    def test_name_must_be_identifier(self):
        """Names must be non-empty identifiers."""
        with pytest.raises(ValueError):
            ParameterSpec.discrete("", [1])
        with pytest.raises(ValueError):
            ParameterSpec.discrete("has space", [1])

    def test_specs_are_frozen(self):
        """Specs cannot be modified after creation."""
        spec = ParameterSpec.discrete("a", [1])
        with pytest.raises(ValueError):
            spec.name = "b"


class TestExplorationConfig:
    """Tests for exploration settings."""

    def test_camel_case_keys_and_defaults(self):
        """Camel-case keys are read and defaults filled in."""
        config = ExplorationConfig.model_validate(
            {"experimentName": "exp", "replications": 2, "finalStep": 10}
        )
        assert config.experiment_name == "exp"
        assert config.model_source == "builtin"
        assert config.start_seed == 0
        assert config.tasks_per_chunk == 8
        assert config.stop_on_extinction is False

    def test_snake_case_names_accepted(self):
        """Snake-case field names are accepted too."""
        config = ExplorationConfig(experiment_name="exp", replications=1, final_step=1)
        assert config.final_step == 1

    @pytest.mark.parametrize("field", ["replications", "final_step", "tasks_per_chunk"])
    def test_positive_fields(self, field):
        """Count fields must be positive."""
        values = {"experiment_name": "exp", "replications": 1, "final_step": 1, field: 0}
        with pytest.raises(ValueError):
            ExplorationConfig(**values)

    def test_negative_seed_rejected(self):
        """A negative start seed is rejected."""
        with pytest.raises(ValueError):
            ExplorationConfig(experiment_name="exp", replications=1, final_step=1, start_seed=-1)


class TestEpidemicParams:
    """Tests for built-in model parameters."""

    def test_defaults(self):
        """Default model parameters match the reference world."""
        params = EpidemicParams()
        assert params.population == 500
        assert params.n_buildings == 50
        assert params.initial_infected == 5
        assert params.env_infection_factor == 0.5
        assert params.latent_hours == 48

    def test_initial_infected_bounded_by_population(self):
        """Initial infections cannot exceed the population."""
        with pytest.raises(ValueError, match="exceeds population"):
            EpidemicParams(population=10, initial_infected=11)

    def test_probabilities_bounded(self):
        """Probabilities must lie in [0, 1]."""
        with pytest.raises(ValueError):
            EpidemicParams(p_die=1.5)

    def test_with_assignment(self):
        """Assignments override fields on a copy."""
        params = EpidemicParams()
        updated = params.with_assignment({"basic_viral_release": 0.02, "population": 100})
        assert updated.basic_viral_release == 0.02
        assert updated.population == 100
        assert params.basic_viral_release == 0.05

    def test_with_assignment_unknown_name(self):
        """Unknown assignment names are a parameters error."""
        with pytest.raises(ConfigError) as exc_info:
            EpidemicParams().with_assignment({"mystery": 1.0})
        assert exc_info.value.field == "parameters"
        assert "mystery" in str(exc_info.value)

    def test_with_assignment_invalid_value(self):
        """Out-of-range assigned values name the field."""
        with pytest.raises(ConfigError) as exc_info:
            EpidemicParams().with_assignment({"basic_viral_decrease": 2.0})
        assert exc_info.value.field == "basic_viral_decrease"


class TestSlurmAndAdapterConfig:
    """Tests for SLURM and adapter settings."""

    def test_slurm_defaults(self):
        """SLURM settings have usable defaults."""
        slurm = SlurmConfig()
        assert slurm.job_name == "param_sweep"
        assert slurm.max_submission == 1
        assert slurm.extra_directives == ()

    def test_slurm_job_name_pattern(self):
        """Job names with spaces are rejected."""
        with pytest.raises(ValueError):
            SlurmConfig(job_name="bad name")

    def test_external_adapter_needs_command(self):
        """The external adapter requires a command template."""
        with pytest.raises(ValueError, match="needs a command"):
            AdapterConfig(kind="external")
        assert AdapterConfig(kind="external", command="gama {xml} {outdir}").command


class TestConfigValidator:
    """Tests for two-layer document validation."""

    def setup_method(self):
        self.validator = ConfigValidator()

    def test_valid_document(self, sweep_document):
        """A well-formed document validates with no errors."""
        result = self.validator.validate(sweep_document)
        assert result.is_valid
        assert result.parameter_count == 2
        assert result.errors == []

    def test_build(self, sweep_document):
        """A valid document builds the full config."""
        config = self.validator.build(sweep_document)
        assert config.exploration.experiment_name == "desk_sweep"
        assert [spec.name for spec in config.parameters] == [
            "basic_viral_release",
            "basic_viral_decrease",
        ]
        assert config.model.population == 60

    def test_zero_replications_names_field(self, sweep_document):
        """A zero replication count names its field."""
        sweep_document["exploration"]["replications"] = 0
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field == "exploration.replications"
        assert str(exc_info.value).startswith("exploration.replications: ")

    def test_collects_every_schema_error(self, sweep_document):
        """Every schema error is reported, sorted by field."""
        sweep_document["exploration"]["replications"] = 0
        sweep_document["exploration"]["finalStep"] = 0
        result = self.validator.validate(sweep_document)
        assert not result.is_valid
        assert result.fields == ["exploration.finalStep", "exploration.replications"]

    def test_missing_exploration(self):
        """A document without exploration is invalid."""
        result = self.validator.validate({"parameters": []})
        assert not result.is_valid
        assert "exploration" in result.errors[0]

    def test_both_domain_forms_rejected(self, sweep_document):
        """A parameter cannot be both continuous and discrete."""
        sweep_document["parameters"][0]["values"] = [0.1]
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field == "parameters.0"

    def test_unknown_section_rejected(self, sweep_document):
        """Unknown top-level sections are rejected."""
        sweep_document["metrics"] = {}
        assert not self.validator.validate(sweep_document).is_valid

    def test_min_above_max_names_parameter(self, sweep_document):
        """A min above max names the parameter."""
        sweep_document["parameters"][0]["min"] = 0.5
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field.startswith("parameters.0")
        assert "must not exceed" in str(exc_info.value)

    def test_duplicate_parameter_names(self, sweep_document):
        """Two parameters with the same name are rejected."""
        sweep_document["parameters"][1]["name"] = "basic_viral_release"
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field == "parameters"
        assert "duplicate parameter names" in str(exc_info.value)

    def test_model_field_path(self, sweep_document):
        """Model errors carry the model field path."""
        sweep_document["model"]["p_die"] = 2.0
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field == "model.p_die"

    def test_unknown_model_field(self, sweep_document):
        """Unknown model fields are rejected."""
        sweep_document["model"]["bogus"] = 1
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field == "model.bogus"

    def test_external_adapter_without_command(self, sweep_document):
        """An external adapter without a command is a config error."""
        sweep_document["adapter"] = {"kind": "external"}
        with pytest.raises(ConfigError) as exc_info:
            self.validator.build(sweep_document)
        assert exc_info.value.field == "adapter"


class TestConfigParser:
    """Tests for config file loading."""

    def setup_method(self):
        self.parser = ConfigParser()

    def test_load(self, config_file):
        """A config file loads into a config."""
        config = self.parser.load(config_file)
        assert config.exploration.replications == 3
        assert config.exploration.tasks_per_chunk == 4

    def test_missing_file(self, tmp_path):
        """A missing config file is a config error."""
        with pytest.raises(ConfigError, match="not found"):
            self.parser.load(tmp_path / "missing.json")

    def test_directory_instead_of_file(self, tmp_path):
        """A directory given as the config file is a config error."""
        with pytest.raises(ConfigError, match="Path is not a file") as exc_info:
            self.parser.parse_file(tmp_path)
        assert isinstance(exc_info.value.__cause__, SweepIOError)

    def test_invalid_json(self, tmp_path):
        """Broken JSON reports its line."""
        path = tmp_path / "broken.json"
        path.write_text('{"exploration": ', encoding="utf-8")
        with pytest.raises(ConfigError, match="Invalid JSON at line 1"):
            self.parser.load(path)

    def test_relative_paths_resolved(self, tmp_path, sweep_document):
        """Relative paths resolve against the config directory."""
        sweep_document["exploration"]["modelSource"] = "models/covid.gaml"
        sweep_document["slurm"] = {"workDir": "cluster"}
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(sweep_document), encoding="utf-8")

        config = self.parser.load(path)
        assert config.exploration.model_source == str(
            (tmp_path / "models" / "covid.gaml").resolve()
        )
        assert config.slurm.work_dir == str((tmp_path / "cluster").resolve())

    def test_builtin_source_untouched(self, config_file):
        """The builtin model source is left as is."""
        assert self.parser.load(config_file).exploration.model_source == "builtin"
