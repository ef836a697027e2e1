"""
Reduced states and expectation values.

Scalar functions accept a single ``JointState`` (or ``JointDensityMatrix``
where noted); ``series.trajectory_observables`` evaluates whole trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dynamics.lindblad import JointDensityMatrix
from ..model.fock_space import JointState, SparseOperator
from ..model.rabi import ModelParams
from ..utils.logging_config import get_logger

logger = get_logger(__name__)

StateLike = JointState | JointDensityMatrix


@dataclass(frozen=True)
class OscillatorDensityMatrix:
    """
    Reduced density matrix of the oscillator in the Fock basis.

    Attributes
    ----------
    rho_osc : np.ndarray
        Complex matrix of dimension ``n_max + 1``.
    n_max : int
        Fock truncation.
    tol : float
        Accepted trace deviation (and negative-diagonal magnitude).
    """

    rho_osc: np.ndarray
    n_max: int
    tol: float = 1e-10

    def __post_init__(self) -> None:
        rho = np.array(self.rho_osc, dtype=complex)
        if rho.shape != (self.n_max + 1, self.n_max + 1):
            raise ValueError(
                f"rho_osc must have shape {(self.n_max + 1,) * 2}, got {rho.shape}"
            )
        deviation = float(np.max(np.abs(rho - rho.conj().T)))
        if deviation > 1e-12:
            raise ValueError(f"rho_osc not hermitian: deviation {deviation:.3e}")
        trace = float(np.trace(rho).real)
        if abs(trace - 1.0) > self.tol:
            raise ValueError(f"rho_osc trace {trace:.12g} deviates from 1")
        if np.min(rho.diagonal().real) < -max(1e-12, self.tol):
            raise ValueError("rho_osc has negative populations")
        rho.setflags(write=False)
        object.__setattr__(self, "rho_osc", rho)

    def populations(self) -> np.ndarray:
        return self.rho_osc.diagonal().real.copy()

    def purity(self) -> float:
        """``Tr rho^2``."""
        return float(np.sum(np.abs(self.rho_osc) ** 2))

    def mean_b(self) -> complex:
        """``<b> = sum_n sqrt(n + 1) rho[n + 1, n]``."""
        n = np.arange(1, self.n_max + 1)
        return complex(np.sum(np.sqrt(n) * np.diagonal(self.rho_osc, offset=-1)))


def reduce_oscillator(state: StateLike) -> OscillatorDensityMatrix:
    """
    Trace out the qubit.

    Parameters
    ----------
    state : JointState or JointDensityMatrix
        Joint state.

    Returns
    -------
    OscillatorDensityMatrix
        ``rho_osc[n, n'] = sum_s alpha_{s n} conj(alpha_{s n'})``.
    """
    N = state.n_max + 1
    if isinstance(state, JointState):
        blocks = state.spin_blocks()
        rho = np.einsum("sn,sm->nm", blocks, blocks.conj())
        return OscillatorDensityMatrix(rho, state.n_max)
    rho = state.rho[:N, :N] + state.rho[N:, N:]
    return OscillatorDensityMatrix(rho, state.n_max, tol=max(1e-10, state.trace_tol))


def reduce_qubit(state: StateLike) -> np.ndarray:
    """2x2 qubit density matrix in the (down, up) basis."""
    N = state.n_max + 1
    if isinstance(state, JointState):
        blocks = state.spin_blocks()
        return blocks @ blocks.conj().T
    rho = state.rho
    return np.array(
        [
            [np.trace(rho[:N, :N]), np.trace(rho[:N, N:])],
            [np.trace(rho[N:, :N]), np.trace(rho[N:, N:])],
        ]
    )


def purity(state: StateLike) -> float:
    """Purity of the reduced oscillator state."""
    return reduce_oscillator(state).purity()


def avg_x(state: StateLike | OscillatorDensityMatrix, params: ModelParams) -> float:
    """
    Scaled coordinate ``<x> = Tr[(b + b^dag) rho_osc] / sqrt(2R)``.

    Examples
    --------
    >>> avg_x(initial_state(FockConfig(n_max=4)), ModelParams(100.0, 0.75, 0.5))
    0.0
    """
    rho = state if isinstance(state, OscillatorDensityMatrix) else reduce_oscillator(state)
    return 2.0 * rho.mean_b().real / math.sqrt(2.0 * params.R)


def avg_p(state: StateLike | OscillatorDensityMatrix, params: ModelParams) -> float:
    """Scaled momentum ``<p> = Tr[i(b^dag - b) rho_osc] / sqrt(2R)``."""
    rho = state if isinstance(state, OscillatorDensityMatrix) else reduce_oscillator(state)
    return 2.0 * rho.mean_b().imag / math.sqrt(2.0 * params.R)


def qubit_observables(state: StateLike) -> tuple[float, float, float, float]:
    """
    Qubit expectations and joint parity.

    Returns
    -------
    Tuple[float, float, float, float]
        ``(<sx>, <sy>, <sz>, <Pi>)``.
    """
    q = reduce_qubit(state)
    coherence = q[1, 0]  # sum_n alpha_up conj(alpha_down)
    sx = 2.0 * coherence.real
    sy = -2.0 * coherence.imag
    sz = float((q[1, 1] - q[0, 0]).real)

    N = state.n_max + 1
    signs = (-1.0) ** np.arange(N)
    if isinstance(state, JointState):
        pops = np.abs(state.spin_blocks()) ** 2
    else:
        pops = state.rho.diagonal().real.reshape(2, N)
    parity = float(np.sum(signs * (pops[0] - pops[1])))
    return float(sx), float(sy), sz, parity


def survival_overlap(psi_t: JointState, psi0: JointState) -> float:
    """``|<psi0|psi_t>|^2``."""
    if psi_t.n_max != psi0.n_max:
        raise ValueError(f"Truncation mismatch: {psi_t.n_max} vs {psi0.n_max}")
    return float(abs(np.vdot(psi0.amps, psi_t.amps)) ** 2)


def energy(state: StateLike, H: SparseOperator) -> float:
    """``<H>`` for a pure or mixed joint state."""
    if isinstance(state, JointState):
        return float(np.vdot(state.amps, H.matrix @ state.amps).real)
    return state.expectation(H)


def left_well_probability(rho: OscillatorDensityMatrix, projector: np.ndarray) -> float:
    """``Tr(rho_osc M)`` for the half-line projector from ``left_well_operator``."""
    return float(np.sum(rho.rho_osc.T * projector).real)
