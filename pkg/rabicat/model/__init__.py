"""
Hilbert space, Hamiltonian and classical effective model.
"""

from .effective import (
    ScalingLaw,
    StationaryPointReport,
    classify_origin,
    effective_surface,
    expansion_delay,
    h_eff,
    hessian,
    linearized_matrix,
    scaling_constant,
    slope_prediction,
    stability_eigenvalues,
    tau_from_scaling,
    well_minima,
    well_period,
)
from .fock_space import (
    FockConfig,
    JointState,
    SparseOperator,
    basis_state,
    build_ladder_ops,
    initial_state,
    number_op,
    pauli_ops,
    tensor,
)
from .rabi import FieldVector, ModelParams, build_hamiltonian, build_parity, field_vector

__all__ = [
    "FieldVector",
    "FockConfig",
    "JointState",
    "ModelParams",
    "ScalingLaw",
    "SparseOperator",
    "StationaryPointReport",
    "basis_state",
    "build_hamiltonian",
    "build_ladder_ops",
    "build_parity",
    "classify_origin",
    "effective_surface",
    "expansion_delay",
    "field_vector",
    "h_eff",
    "hessian",
    "initial_state",
    "linearized_matrix",
    "number_op",
    "pauli_ops",
    "scaling_constant",
    "slope_prediction",
    "stability_eigenvalues",
    "tau_from_scaling",
    "tensor",
    "well_minima",
    "well_period",
]
