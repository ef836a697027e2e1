"""
Unitary propagation of the joint qubit-oscillator state.

Two propagators share one output format:

- ``eigendecomposition``: dense ``eigh`` once, then exact phases at every
  sample. Used up to ``DENSE_DIMENSION_LIMIT``.
- ``krylov``: short-time Lanczos propagation with an a-posteriori error
  estimate and substep halving, for large truncations.

Every sample is checked for probability leaking into the top of the Fock
ladder; a violation aborts with the offending time.
"""

from __future__ import annotations

import json
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import h5py
import numpy as np
import scipy.linalg as sla

from ..errors import KrylovConvergenceError, TruncationError
from ..model.fock_space import JointState, SparseOperator, tail_weight
from ..utils.logging_config import get_logger
from ..utils.tools import get_package_version
from .plan import PropagatorPlan

logger = get_logger(__name__)

# Lanczos residual below which the Krylov space is invariant
BREAKDOWN_TOL = 1e-14
# Smallest Krylov substep relative to the sampling step
MIN_SUBSTEP_FRACTION = 1e-6
# Samples propagated together by the dense propagator
DENSE_CHUNK = 512


def _serialize_for_hdf5(obj: Any) -> Any:
    """
    Convert Python objects to HDF5-compatible types for attrs.

    Parameters
    ----------
    obj : Any
        Object to serialize

    Returns
    -------
    Any
        HDF5-compatible object
    """
    if obj is None:
        return "None"
    elif isinstance(obj, (str, int, float, bool)):
        return obj
    elif isinstance(obj, (dict, list, tuple)):
        return json.dumps(obj, sort_keys=True)
    else:
        return str(obj)


def _deserialize_from_hdf5(value: Any) -> Any:
    """Inverse of ``_serialize_for_hdf5`` for JSON-encoded containers."""
    if isinstance(value, bytes):
        value = value.decode()
    if isinstance(value, np.generic):
        value = value.item()
    if value == "None":
        return None
    if isinstance(value, str) and value[:1] in ("{", "["):
        try:
            return json.loads(value)
        except ValueError:
            return value
    return value


@dataclass
class StateTrajectory:
    """
    Sampled pure-state trajectory.

    Attributes
    ----------
    times : np.ndarray
        Sample times, shape ``(T,)``.
    amps : np.ndarray
        Amplitudes, shape ``(T, 2 (n_max + 1))``, spin-major.
    n_max : int
        Fock truncation.
    metadata : Dict[str, Any]
        Run description carried into persisted files.

    Examples
    --------
    >>> traj = evolve_unitary(H, initial_state(cfg), plan)
    >>> for state in traj:
    ...     print(state.time, state.norm())
    """

    times: np.ndarray
    amps: np.ndarray
    n_max: int
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.ndim != 2 or self.amps.shape[0] != self.times.size:
            raise ValueError(
                f"amps must have shape (T, dim) with T={self.times.size}, got {self.amps.shape}"
            )
        if self.amps.shape[1] != 2 * (self.n_max + 1):
            raise ValueError(
                f"amps width {self.amps.shape[1]} does not match n_max={self.n_max}"
            )

    def __len__(self) -> int:
        return int(self.times.size)

    def __getitem__(self, index: int) -> JointState:
        return JointState(self.amps[index], self.n_max, time=float(self.times[index]))

    def __iter__(self) -> Iterator[JointState]:
        for i in range(len(self)):
            yield self[i]

    def state_at(self, time: float) -> JointState:
        """Sample closest to ``time``."""
        index = int(np.argmin(np.abs(self.times - time)))
        return self[index]

    def to_hdf5(self, filepath: str | Path) -> Path:
        """
        Save the trajectory to an HDF5 file.

        Parameters
        ----------
        filepath : str or Path
            Output file; overwritten if it exists.

        Returns
        -------
        Path
            The written file.
        """
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with h5py.File(str(filepath), "w") as f:
            f.create_dataset("times", data=self.times)
            f.create_dataset("amps", data=self.amps, compression="gzip")
            f.attrs["n_max"] = int(self.n_max)
            f.attrs["rabicat_version"] = get_package_version()
            metadata_group = f.create_group("metadata")
            for key, value in self.metadata.items():
                metadata_group.attrs[key] = _serialize_for_hdf5(value)
        logger.info(f"Saved trajectory with {len(self)} samples to {filepath}")
        return filepath

    @classmethod
    def from_hdf5(cls, filepath: str | Path) -> StateTrajectory:
        """
        Load a trajectory written by ``to_hdf5``.

        Raises
        ------
        FileNotFoundError
            If the file does not exist.
        """
        filepath = Path(filepath)
        if not filepath.exists():
            raise FileNotFoundError(f"HDF5 file not found: {filepath}")
        with h5py.File(str(filepath), "r") as f:
            times = f["times"][()]
            amps = f["amps"][()]
            n_max = int(f.attrs["n_max"])
            metadata = {}
            if "metadata" in f:
                metadata_group = f["metadata"]
                assert isinstance(metadata_group, h5py.Group)
                for key in metadata_group.attrs:
                    metadata[key] = _deserialize_from_hdf5(metadata_group.attrs[key])
        return cls(times=times, amps=amps, n_max=n_max, metadata=metadata)


def _check_tail(amps: np.ndarray, times: np.ndarray, n_max: int, tail_tol: float) -> None:
    """Raise TruncationError at the first sample whose tail weight exceeds tail_tol."""
    start = int(np.floor(0.95 * n_max)) + 1
    blocks = amps.reshape(amps.shape[0], 2, n_max + 1)
    weights = np.sum(np.abs(blocks[:, :, start:]) ** 2, axis=(1, 2))
    bad = np.flatnonzero(weights > tail_tol)
    if bad.size:
        i = int(bad[0])
        raise TruncationError(float(times[i]), float(weights[i]), tail_tol)


def _evolve_dense(
    H: SparseOperator, psi0: np.ndarray, times: np.ndarray, n_max: int, tail_tol: float
) -> np.ndarray:
    energies, vectors = sla.eigh(H.toarray())
    coeffs = vectors.conj().T @ psi0
    out = np.empty((times.size, psi0.size), dtype=complex)
    for start in range(0, times.size, DENSE_CHUNK):
        t = times[start : start + DENSE_CHUNK]
        phases = np.exp(-1j * np.outer(t, energies)) * coeffs[np.newaxis, :]
        block = phases @ vectors.T
        _check_tail(block, t, n_max, tail_tol)
        out[start : start + DENSE_CHUNK] = block
    return out


def lanczos(
    H: SparseOperator, v: np.ndarray, m: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """
    Lanczos tridiagonalization with full reorthogonalization.

    Parameters
    ----------
    H : SparseOperator
        Hermitian operator.
    v : np.ndarray
        Nonzero start vector.
    m : int
        Maximum Krylov dimension.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray, float]
        Orthonormal basis ``V`` (dim x k), diagonal ``alpha`` (k), off-diagonal
        ``beta`` (k - 1) and the residual norm ``beta_k`` (0 on breakdown).
    """
    dim = v.size
    m = min(m, dim)
    V = np.zeros((dim, m), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    V[:, 0] = v / np.linalg.norm(v)
    k = m
    for j in range(m):
        w = H.matrix @ V[:, j]
        alpha[j] = np.vdot(V[:, j], w).real
        # Full reorthogonalization against all previous vectors
        w = w - V[:, : j + 1] @ (V[:, : j + 1].conj().T @ w)
        w = w - V[:, : j + 1] @ (V[:, : j + 1].conj().T @ w)
        beta[j] = np.linalg.norm(w)
        if beta[j] < BREAKDOWN_TOL:
            k = j + 1
            beta[j] = 0.0
            break
        if j + 1 < m:
            V[:, j + 1] = w / beta[j]
    return V[:, :k], alpha[:k], beta[: k - 1], float(beta[k - 1])


def _krylov_interval(
    H: SparseOperator,
    psi: np.ndarray,
    t_start: float,
    interval: float,
    plan: PropagatorPlan,
    h_guess: float,
) -> tuple[np.ndarray, float]:
    """Propagate ``psi`` by ``interval`` with adaptive Krylov substeps."""
    elapsed = 0.0
    h = min(h_guess, interval)
    h_min = plan.dt * MIN_SUBSTEP_FRACTION
    while elapsed < interval * (1.0 - 1e-12):
        h = min(h, interval - elapsed)
        norm = np.linalg.norm(psi)
        V, alpha, beta, beta_k = lanczos(H, psi, plan.krylov_dim)
        theta, S = sla.eigh_tridiagonal(alpha, beta) if alpha.size > 1 else (alpha, np.ones((1, 1)))
        while True:
            y = S @ (np.exp(-1j * theta * h) * S[0, :])
            error = norm * beta_k * abs(y[-1])
            if error <= plan.step_tol:
                break
            h *= 0.5
            logger.debug(f"Krylov substep halved to {h:.3e} at t={t_start + elapsed:.6g}")
            if h < h_min:
                raise KrylovConvergenceError(
                    t_start + elapsed,
                    f"error {error:.3e} > step_tol={plan.step_tol:.1e} with h={h:.3e}; "
                    "increase krylov_dim",
                )
        psi = norm * (V @ y)
        elapsed += h
        h = min(2.0 * h, interval)
    return psi, h


def _evolve_krylov(
    H: SparseOperator,
    psi0: np.ndarray,
    times: np.ndarray,
    plan: PropagatorPlan,
    n_max: int,
    tail_tol: float,
) -> np.ndarray:
    out = np.empty((times.size, psi0.size), dtype=complex)
    out[0] = psi0
    psi = psi0.copy()
    h = plan.dt
    for i in range(1, times.size):
        psi, h = _krylov_interval(H, psi, times[i - 1], times[i] - times[i - 1], plan, h)
        out[i] = psi
        weight = tail_weight(psi, n_max)
        if weight > tail_tol:
            raise TruncationError(float(times[i]), weight, tail_tol)
    return out


def evolve_unitary(
    H: SparseOperator,
    psi0: JointState,
    plan: PropagatorPlan,
    tail_tol: float = 1e-8,
) -> StateTrajectory:
    """
    Propagate a pure state under a time-independent Hamiltonian.

    Parameters
    ----------
    H : SparseOperator
        Hermitian Hamiltonian in the spin-major basis.
    psi0 : JointState
        Normalized initial state.
    plan : PropagatorPlan
        Sampling grid and method; ``auto`` is resolved from the dimension.
    tail_tol : float
        Allowed Fock tail weight at every sample.

    Returns
    -------
    StateTrajectory
        States at ``plan.times()``.

    Raises
    ------
    TruncationError
        Tail weight above ``tail_tol`` at some sample.
    KrylovConvergenceError
        A Krylov substep could not reach ``step_tol``.

    Examples
    --------
    >>> cfg = FockConfig.for_size(10.0)
    >>> H = build_hamiltonian(ModelParams(10.0, 0.75, 0.5), cfg)
    >>> traj = evolve_unitary(H, initial_state(cfg), PropagatorPlan(dt=0.1, t_max=5.0))
    >>> len(traj)
    51
    """
    if not H.hermitian:
        raise ValueError("evolve_unitary requires a Hamiltonian flagged hermitian")
    if H.dimension != psi0.amps.size:
        raise ValueError(
            f"Dimension mismatch: H has {H.dimension}, state has {psi0.amps.size}"
        )

    plan = plan.resolve(H.dimension)
    times = plan.times()
    psi = np.array(psi0.amps)
    logger.info(
        f"Unitary evolution: dim={H.dimension}, method={plan.method}, "
        f"{times.size} samples up to t={times[-1]:.6g}"
    )

    if plan.method == "eigendecomposition":
        amps = _evolve_dense(H, psi, times, psi0.n_max, tail_tol)
    else:
        amps = _evolve_krylov(H, psi, times, plan, psi0.n_max, tail_tol)

    return StateTrajectory(
        times=times,
        amps=amps,
        n_max=psi0.n_max,
        metadata={"method": plan.method, "plan": plan.to_dict()},
    )
