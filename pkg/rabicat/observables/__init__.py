"""
Reduced states, expectation values and phase-space distributions.
"""

from .phase_space import (
    CoordinateDistribution,
    PhaseGridSpec,
    PhaseSpaceGrid,
    coordinate_distribution,
    hermite_functions,
    left_well_operator,
    wigner,
)
from .reduced import (
    OscillatorDensityMatrix,
    avg_p,
    avg_x,
    energy,
    left_well_probability,
    purity,
    qubit_observables,
    reduce_oscillator,
    reduce_qubit,
    survival_overlap,
)
from .series import TimeSeries, density_observables, trajectory_observables

__all__ = [
    "CoordinateDistribution",
    "OscillatorDensityMatrix",
    "PhaseGridSpec",
    "PhaseSpaceGrid",
    "TimeSeries",
    "avg_p",
    "avg_x",
    "coordinate_distribution",
    "density_observables",
    "energy",
    "hermite_functions",
    "left_well_operator",
    "left_well_probability",
    "purity",
    "qubit_observables",
    "reduce_oscillator",
    "reduce_qubit",
    "survival_overlap",
    "trajectory_observables",
    "wigner",
]
