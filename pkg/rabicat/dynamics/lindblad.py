"""
Lindblad master-equation propagation with oscillator damping.

    d rho / dt = -i [H, rho] + kappa (B rho B^dag - 1/2 {B^dag B, rho})

with ``B = I_qubit (x) b`` and ``kappa = gamma / R``. The matrix-valued
right-hand side is integrated with classic RK4 and step doubling; the
density matrix is symmetrized after every step.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ..errors import PositivityError, StepSizeUnderflowError, TruncationError
from ..model.fock_space import TAIL_FRACTION, JointState, SparseOperator, identity_op, tensor
from ..model.rabi import ModelParams
from ..utils.logging_config import get_logger
from .plan import PropagatorPlan

logger = get_logger(__name__)

HERMITIAN_TOL = 1e-10
TRACE_DRIFT_WARN = 1e-10
POSITIVITY_TOL = 1e-6
# Smallest accepted step relative to the sampling step
MIN_STEP_FRACTION = 1e-9


@dataclass(frozen=True)
class JointDensityMatrix:
    """
    Density matrix of the qubit-oscillator system.

    Attributes
    ----------
    rho : np.ndarray
        Complex matrix of dimension ``2 (n_max + 1)``, spin-major.
    n_max : int
        Fock truncation.
    time : float
        Time label.
    trace_tol : float
        Accepted deviation of the trace from one.
    """

    rho: np.ndarray
    n_max: int
    time: float = 0.0
    trace_tol: float = 1e-8

    def __post_init__(self) -> None:
        rho = np.array(self.rho, dtype=complex)
        dim = 2 * (self.n_max + 1)
        if rho.shape != (dim, dim):
            raise ValueError(f"rho must have shape {(dim, dim)}, got {rho.shape}")
        deviation = float(np.max(np.abs(rho - rho.conj().T)))
        if deviation > HERMITIAN_TOL:
            raise ValueError(f"rho not hermitian: max|rho - rho^dag| = {deviation:.3e}")
        trace = float(np.trace(rho).real)
        if abs(trace - 1.0) > self.trace_tol:
            raise ValueError(f"rho trace {trace:.12g} deviates from 1 by more than {self.trace_tol}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_state(cls, psi: JointState) -> JointDensityMatrix:
        """Projector ``|psi><psi|``."""
        return cls(np.outer(psi.amps, psi.amps.conj()), psi.n_max, psi.time)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def min_eigenvalue(self) -> float:
        return float(sla.eigvalsh(self.rho, subset_by_index=[0, 0])[0])

    def expectation(self, op: SparseOperator) -> float:
        """Real part of ``Tr(op rho)``."""
        return float(np.sum((op.matrix @ self.rho).diagonal()).real)

    def tail_weight(self) -> float:
        start = int(np.floor(TAIL_FRACTION * self.n_max)) + 1
        pops = self.rho.diagonal().real.reshape(2, self.n_max + 1)
        return float(pops[:, start:].sum())


def _joint_annihilator(b: SparseOperator, dimension: int) -> SparseOperator:
    if b.dimension == dimension:
        return b
    if 2 * b.dimension == dimension:
        return tensor(identity_op(2), b)
    raise ValueError(
        f"Jump operator dimension {b.dimension} incompatible with state dimension {dimension}"
    )


class _LindbladRHS:
    """Right-hand side of the master equation for fixed operators."""

    def __init__(self, H: SparseOperator, B: SparseOperator, kappa: float):
        self.H = H.matrix
        self.B = B.matrix
        self.B_dag = B.matrix.conj().T.tocsr()
        self.kappa = kappa
        # Hermitian, not necessarily diagonal for a general joint jump operator
        self.BdB = (self.B_dag @ self.B).tocsr()

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        h_rho = self.H @ rho
        out = -1j * (h_rho - h_rho.conj().T)
        if self.kappa > 0.0:
            jump = self.B @ (self.B @ rho.conj().T).conj().T
            anti = self.BdB @ rho + (self.BdB @ rho.conj().T).conj().T
            out = out + self.kappa * (jump - 0.5 * anti)
        return out


def _rk4_step(rhs: _LindbladRHS, rho: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * h * k1)
    k3 = rhs(rho + 0.5 * h * k2)
    k4 = rhs(rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _symmetrize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def evolve_lindblad(
    H: SparseOperator,
    b: SparseOperator,
    rho0: JointDensityMatrix,
    params: ModelParams,
    plan: PropagatorPlan,
    tail_tol: float = 1e-8,
    positivity_stride: int = 10,
    trace_tol: float = 1e-8,
) -> Iterator[JointDensityMatrix]:
    """
    Integrate the master equation, yielding states on the sampling grid.

    States are yielded one by one rather than stored; a trajectory of full
    density matrices at a realistic truncation does not fit in memory.

    Parameters
    ----------
    H : SparseOperator
        Hermitian Hamiltonian (may be zero).
    b : SparseOperator
        Oscillator annihilator, either on the oscillator space or on the
        joint space.
    rho0 : JointDensityMatrix
        Initial state.
    params : ModelParams
        Supplies ``gamma / R``.
    plan : PropagatorPlan
        Sampling grid (``dt``, ``t_max``) and ``step_tol`` (local error per
        unit time).
    tail_tol : float
        Allowed Fock tail weight at outputs.
    positivity_stride : int
        Smallest eigenvalue is checked every this many outputs and at the end.
    trace_tol : float
        Accepted trace deviation of every output state.

    Yields
    ------
    JointDensityMatrix
        ``rho(t)`` for ``t`` in ``plan.times()``.

    Raises
    ------
    StepSizeUnderflowError
        The adaptive step fell below ``dt * 1e-9``.
    PositivityError
        An eigenvalue below ``-1e-6`` was found.
    TruncationError
        Tail weight above ``tail_tol``.
    ValueError
        An output trace deviates from one by more than ``trace_tol``.
    """
    if not H.hermitian:
        raise ValueError("evolve_lindblad requires a Hamiltonian flagged hermitian")
    dim = rho0.rho.shape[0]
    if H.dimension != dim:
        raise ValueError(f"Dimension mismatch: H has {H.dimension}, rho has {dim}")

    B = _joint_annihilator(b, dim)
    rhs = _LindbladRHS(H, B, params.kappa)
    times = plan.times()
    tol = plan.step_tol
    h_min = plan.dt * MIN_STEP_FRACTION

    h_norm = float(abs(H.matrix).sum(axis=1).max()) if H.nnz else 0.0
    h = plan.dt if h_norm == 0.0 else min(plan.dt, 1.0 / h_norm)
    logger.info(
        f"Lindblad evolution: dim={dim}, kappa={params.kappa:.3e}, "
        f"{times.size} samples, initial step {h:.3e}"
    )

    rho = np.array(rho0.rho)
    t = 0.0
    n_steps = 0
    for index, t_out in enumerate(times):
        while t < t_out - 1e-12 * max(1.0, t_out):
            step = min(h, t_out - t)
            full = _rk4_step(rhs, rho, step)
            half = _rk4_step(rhs, _rk4_step(rhs, rho, 0.5 * step), 0.5 * step)
            error = float(np.max(np.abs(half - full))) / 15.0
            allowed = tol * step
            factor = 2.0 if error == 0.0 else 0.9 * (allowed / error) ** 0.25
            factor = min(2.0, max(0.2, factor))
            if error <= allowed:
                rho = _symmetrize(half)
                t += step
                n_steps += 1
                if step == h:
                    h = step * factor
            else:
                h = step * factor
                logger.debug(f"Lindblad step rejected at t={t:.6g}, new h={h:.3e}")
                if h < h_min:
                    raise StepSizeUnderflowError(t, h)

        state = JointDensityMatrix(rho, rho0.n_max, float(t_out), trace_tol=trace_tol)
        drift = abs(state.trace() - 1.0)
        if drift > TRACE_DRIFT_WARN:
            logger.warning(f"Trace drift {drift:.3e} at t={t_out:.6g}")
        weight = state.tail_weight()
        if weight > tail_tol:
            raise TruncationError(float(t_out), weight, tail_tol)
        if index % positivity_stride == 0 or index == times.size - 1:
            min_eig = state.min_eigenvalue()
            if min_eig < -POSITIVITY_TOL:
                raise PositivityError(float(t_out), min_eig)
        yield state

    logger.info(f"Lindblad evolution finished after {n_steps} accepted steps")
