"""
Observable time series of whole trajectories.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
import polars as pl

from ..config.defaults import SUPPORTED_OUTPUTS
from ..dynamics.evolution import StateTrajectory
from ..dynamics.lindblad import JointDensityMatrix
from ..model.fock_space import SparseOperator
from ..model.rabi import ModelParams
from ..utils.logging_config import get_logger
from .reduced import (
    avg_p,
    avg_x,
    energy,
    left_well_probability,
    qubit_observables,
    reduce_oscillator,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class TimeSeries:
    """
    Sampled observable trajectory.

    Attributes
    ----------
    times : np.ndarray
        Strictly increasing sample times.
    values : np.ndarray
        Real values, same length as ``times``.
    label : str
        Observable name.
    """

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError(
                f"times and values must be 1-D of equal length, got {times.shape} and {values.shape}"
            )
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError(f"times of series '{self.label}' must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def dt(self) -> float:
        """Mean sampling step."""
        return float((self.times[-1] - self.times[0]) / (self.times.size - 1))

    @classmethod
    def from_frame(cls, df: pl.DataFrame, column: str, time_column: str = "t") -> TimeSeries:
        return cls(df[time_column].to_numpy(), df[column].to_numpy(), label=column)


def _check_outputs(outputs: Sequence[str], H: SparseOperator | None, projector) -> None:
    unknown = [o for o in outputs if o not in SUPPORTED_OUTPUTS]
    if unknown:
        raise ValueError(f"Unsupported outputs {unknown}")
    if "energy" in outputs and H is None:
        raise ValueError("energy output requires the Hamiltonian")
    if "p_left" in outputs and projector is None:
        raise ValueError("p_left output requires the left-well projector")


def trajectory_observables(
    traj: StateTrajectory,
    params: ModelParams,
    outputs: Sequence[str] = SUPPORTED_OUTPUTS,
    H: SparseOperator | None = None,
    projector: np.ndarray | None = None,
) -> pl.DataFrame:
    """
    Observable table of a pure-state trajectory.

    Evaluated on the full amplitude array at once rather than state by state.

    Parameters
    ----------
    traj : StateTrajectory
        Sampled states.
    params : ModelParams
        Supplies R for the scaled quadratures.
    outputs : Sequence[str]
        Columns to compute, from ``SUPPORTED_OUTPUTS``.
    H : SparseOperator, optional
        Needed for ``energy``.
    projector : np.ndarray, optional
        Left-well matrix from ``left_well_operator``, needed for ``p_left``.

    Returns
    -------
    pl.DataFrame
        One row per sample, columns in the order of ``outputs``.
    """
    _check_outputs(outputs, H, projector)
    N = traj.n_max + 1
    blocks = traj.amps.reshape(len(traj), 2, N)
    down, up = blocks[:, 0, :], blocks[:, 1, :]

    columns: dict[str, np.ndarray] = {"t": traj.times}

    # <b> summed over both spin blocks
    sqrt_n = np.sqrt(np.arange(1, N))
    mean_b = np.sum(sqrt_n * np.conj(blocks[:, :, :-1]) * blocks[:, :, 1:], axis=(1, 2))
    scale = 2.0 / math.sqrt(2.0 * params.R)
    columns["avg_x"] = scale * mean_b.real
    columns["avg_p"] = scale * mean_b.imag

    coherence = np.sum(np.conj(down) * up, axis=1)
    pop_down = np.abs(down) ** 2
    pop_up = np.abs(up) ** 2
    columns["sigma_x"] = 2.0 * coherence.real
    columns["sigma_y"] = -2.0 * coherence.imag
    columns["sigma_z"] = pop_up.sum(axis=1) - pop_down.sum(axis=1)
    signs = (-1.0) ** np.arange(N)
    columns["parity"] = (pop_down - pop_up) @ signs

    columns["overlap"] = np.abs(traj.amps @ np.conj(traj.amps[0])) ** 2

    # Oscillator purity equals qubit purity for a pure joint state
    q_dd = pop_down.sum(axis=1)
    q_uu = pop_up.sum(axis=1)
    columns["purity"] = q_dd**2 + q_uu**2 + 2.0 * np.abs(coherence) ** 2

    if "p_left" in outputs:
        columns["p_left"] = np.einsum(
            "tsn,nm,tsm->t", np.conj(blocks), projector, blocks, optimize=True
        ).real
    if "energy" in outputs:
        h_psi = (H.matrix @ traj.amps.T).T
        columns["energy"] = np.sum(np.conj(traj.amps) * h_psi, axis=1).real

    return pl.DataFrame({name: np.asarray(columns[name], dtype=float) for name in outputs})


def density_observables(
    states: Iterable[JointDensityMatrix],
    params: ModelParams,
    outputs: Sequence[str] = SUPPORTED_OUTPUTS,
    H: SparseOperator | None = None,
    projector: np.ndarray | None = None,
    reference: np.ndarray | None = None,
) -> pl.DataFrame:
    """
    Observable table of a mixed-state trajectory, consumed state by state.

    ``overlap`` is the fidelity ``<psi0|rho(t)|psi0>`` with the pure reference
    state ``reference`` (the initial state by default, taken as the dominant
    eigenvector of the first ``rho``).
    """
    _check_outputs(outputs, H, projector)
    rows: dict[str, list[float]] = {name: [] for name in outputs}
    psi0 = reference

    for state in states:
        if psi0 is None:
            _, vecs = np.linalg.eigh(state.rho)
            psi0 = vecs[:, -1]
        rho_osc = reduce_oscillator(state)
        sx, sy, sz, parity = qubit_observables(state)
        values = {
            "t": state.time,
            "avg_x": avg_x(rho_osc, params),
            "avg_p": avg_p(rho_osc, params),
            "sigma_x": sx,
            "sigma_y": sy,
            "sigma_z": sz,
            "parity": parity,
            "overlap": float(np.vdot(psi0, state.rho @ psi0).real),
            "purity": rho_osc.purity(),
        }
        if "p_left" in outputs:
            values["p_left"] = left_well_probability(rho_osc, projector)
        if "energy" in outputs:
            values["energy"] = energy(state, H)
        for name in outputs:
            rows[name].append(float(values[name]))

    return pl.DataFrame({name: np.asarray(rows[name], dtype=float) for name in outputs})
