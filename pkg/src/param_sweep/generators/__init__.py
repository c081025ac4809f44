"""
Template-driven generators of sweep artifacts: chunk plan XML, SLURM
array job scripts and SVG figures.
"""

from .base import BaseGenerator
from .plan_xml import PlanXMLGenerator
from .sbatch import SbatchFiles, SbatchGenerator
from .svg import SVGGenerator

__all__ = ["BaseGenerator", "PlanXMLGenerator", "SbatchFiles", "SbatchGenerator", "SVGGenerator"]
