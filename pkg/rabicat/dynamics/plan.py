"""
Propagation plan: sampling grid and propagator selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..utils.logging_config import get_logger

logger = get_logger(__name__)

METHODS = ("auto", "eigendecomposition", "krylov")

# Largest joint dimension propagated by a full dense eigendecomposition
DENSE_DIMENSION_LIMIT = 4096


@dataclass(frozen=True)
class PropagatorPlan:
    """
    How and where in time to propagate.

    Attributes
    ----------
    method : str
        ``eigendecomposition``, ``krylov`` or ``auto`` (dense up to
        ``DENSE_DIMENSION_LIMIT``, Krylov above).
    dt : float
        Output sampling step in units of the inverse oscillator frequency.
    t_max : float
        Final time.
    krylov_dim : int
        Krylov subspace size.
    step_tol : float
        Local error target per step.

    Examples
    --------
    >>> plan = PropagatorPlan(dt=0.5, t_max=2.0)
    >>> plan.times()
    array([0. , 0.5, 1. , 1.5, 2. ])
    """

    method: str = "auto"
    dt: float = 0.01
    t_max: float = 40.0
    krylov_dim: int = 30
    step_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ValueError(f"t_max must be >= dt, got t_max={self.t_max}, dt={self.dt}")
        if int(self.krylov_dim) != self.krylov_dim or self.krylov_dim < 4:
            raise ValueError(f"krylov_dim must be an integer >= 4, got {self.krylov_dim}")
        if not self.step_tol > 0:
            raise ValueError(f"step_tol must be positive, got {self.step_tol}")

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.t_max / self.dt + 1e-9)) + 1

    def times(self) -> np.ndarray:
        """Sampling grid ``0, dt, 2 dt, ...`` up to ``t_max``."""
        return self.dt * np.arange(self.n_samples, dtype=float)

    def resolve(self, dimension: int) -> PropagatorPlan:
        """
        Plan with ``auto`` replaced by the concrete method for a dimension.
        """
        if self.method != "auto":
            return self
        method = "eigendecomposition" if dimension <= DENSE_DIMENSION_LIMIT else "krylov"
        logger.info(f"Propagator for dimension {dimension}: {method}")
        return replace(self, method=method)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "dt": float(self.dt),
            "t_max": float(self.t_max),
            "krylov_dim": int(self.krylov_dim),
            "step_tol": float(self.step_tol),
        }
