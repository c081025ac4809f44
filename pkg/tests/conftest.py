"""
Shared fixtures: small, fast sweep configurations.
"""

import json
from pathlib import Path
from typing import Any, Dict

import pytest

from param_sweep.models import EpidemicParams

SMALL_MODEL: Dict[str, Any] = {
    "population": 60,
    "n_buildings": 6,
    "initial_infected": 4,
    "latent_hours": 6,
    "presymptomatic_hours": 4,
    "infectious_hours": 12,
    "hospital_hours": 8,
    "icu_hours": 8,
    "p_hospitalize": 0.5,
    "p_icu": 0.5,
    "p_die": 0.5,
}


@pytest.fixture
def small_params() -> EpidemicParams:
    """A small population with short stages, so epidemics finish within ~100 hours."""
    return EpidemicParams(**SMALL_MODEL)


@pytest.fixture
def sweep_document() -> Dict[str, Any]:
    """A 2x2 grid with 3 replications of 48 hours each (12 tasks, 3 chunks)."""
    return {
        "exploration": {
            "experimentName": "desk_sweep",
            "replications": 3,
            "finalStep": 48,
            "tasksPerChunk": 4,
        },
        "parameters": [
            {"name": "basic_viral_release", "min": 0.01, "max": 0.1, "count": 2},
            {"name": "basic_viral_decrease", "values": [0.05, 0.2]},
        ],
        "model": dict(SMALL_MODEL),
    }


@pytest.fixture
def config_file(tmp_path: Path, sweep_document: Dict[str, Any]) -> Path:
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(sweep_document), encoding="utf-8")
    return path
