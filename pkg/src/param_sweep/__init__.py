"""
param-sweep: parameter-sweep orchestration for simulation models.

This package enumerates the experiment space of a simulation model, runs
it locally on a worker pool or as a SLURM array job, aggregates the
replications of every point and renders CSV and SVG reports. A built-in
agent-based SEIR model with building contamination serves as reference
simulator.
"""

__version__ = "0.1.0"

from .core import SweepWorkspace
from .exceptions import SweepError

__all__ = ["SweepWorkspace", "SweepError", "__version__"]
