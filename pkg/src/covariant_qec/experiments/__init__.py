"""Experiment drivers and the command-line interface."""

from .concentration import ConcentrationRecord, ConcentrationSummary, run_concentration, summarize
from .config import ExperimentConfig
from .demo import DEMO_KINDS, run_demo
from .nogo import NogoReport, run_nogo_probe

__all__ = [
    "ConcentrationRecord",
    "ConcentrationSummary",
    "DEMO_KINDS",
    "ExperimentConfig",
    "NogoReport",
    "run_concentration",
    "run_demo",
    "run_nogo_probe",
    "summarize",
]
