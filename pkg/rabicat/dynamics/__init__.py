"""
Time propagation: unitary (dense or Krylov) and Lindblad.
"""

from .evolution import StateTrajectory, evolve_unitary, lanczos
from .lindblad import JointDensityMatrix, evolve_lindblad
from .plan import DENSE_DIMENSION_LIMIT, PropagatorPlan

__all__ = [
    "DENSE_DIMENSION_LIMIT",
    "JointDensityMatrix",
    "PropagatorPlan",
    "StateTrajectory",
    "evolve_lindblad",
    "evolve_unitary",
    "lanczos",
]
