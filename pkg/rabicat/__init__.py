"""
RABICAT - cat-state birth and death in the extended Rabi model.

Exact evolution of a qubit coupled to a truncated oscillator, phase-space
diagnostics, Lindblad damping and the classical effective-model analytics.
"""

__version__ = "2026.10.0"

from .config import RunConfig, load_config, parse_config
from .model import FockConfig, ModelParams, build_hamiltonian, classify_origin
from .simulation import Simulation, simulate

__all__ = [
    "FockConfig",
    "ModelParams",
    "RunConfig",
    "Simulation",
    "build_hamiltonian",
    "classify_origin",
    "load_config",
    "parse_config",
    "simulate",
]
