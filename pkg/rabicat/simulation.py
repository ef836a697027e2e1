"""
Run orchestration: from a RunConfig to observable tables and artifacts.
"""

from __future__ import annotations

from dataclasses import replace
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl

from .config.run_config import RunConfig, run_config_from_dict
from .dynamics.evolution import StateTrajectory, evolve_unitary
from .dynamics.lindblad import JointDensityMatrix, evolve_lindblad
from .model.fock_space import SparseOperator, build_ladder_ops, initial_state
from .model.rabi import build_hamiltonian
from .observables.phase_space import PhaseGridSpec, PhaseSpaceGrid, left_well_operator, wigner
from .observables.reduced import reduce_oscillator
from .observables.series import TimeSeries, density_observables, trajectory_observables
from .utils.logging_config import get_logger
from .utils.tools import get_package_version, write_csv, write_metadata

logger = get_logger(__name__)


class Simulation:
    """
    One evolution of the qubit-oscillator system.

    Unitary for ``gamma == 0``, Lindblad otherwise. The observable table is
    produced by ``run``; the pure-state trajectory is kept for unitary runs so
    phase-space snapshots can be taken afterwards.

    Attributes
    ----------
    config : RunConfig
        Validated run description.
    table : pl.DataFrame or None
        Observables after ``run``.
    trajectory : StateTrajectory or None
        Sampled states of a unitary run.

    Examples
    --------
    >>> sim = Simulation(parse_config("R=10, lambda=0.75, delta=0.5, t_max=5"))
    >>> table = sim.run()
    >>> sim.save("runs/evolve.csv")
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.table: pl.DataFrame | None = None
        self.trajectory: StateTrajectory | None = None
        self._method: str | None = None

    @property
    def params(self):
        return self.config.model

    @property
    def is_dissipative(self) -> bool:
        return self.config.model.gamma > 0.0

    @cached_property
    def hamiltonian(self) -> SparseOperator:
        return build_hamiltonian(self.config.model, self.config.fock)

    @cached_property
    def left_well(self) -> np.ndarray:
        return left_well_operator(self.config.fock.n_max)

    @property
    def method(self) -> str:
        """Propagator actually used (or to be used)."""
        if self._method is not None:
            return self._method
        if self.is_dissipative:
            return "lindblad_rk4"
        return self.config.plan.resolve(self.config.fock.dimension).method

    def _extras(self, outputs) -> dict[str, Any]:
        return {
            "H": self.hamiltonian if "energy" in outputs else None,
            "projector": self.left_well if "p_left" in outputs else None,
        }

    def run(self, outputs: tuple[str, ...] | None = None) -> pl.DataFrame:
        """
        Evolve and tabulate observables.

        Parameters
        ----------
        outputs : Tuple[str, ...], optional
            Columns to compute; the configured outputs by default.

        Returns
        -------
        pl.DataFrame
            One row per sample.
        """
        outputs = outputs or self.config.outputs
        cfg = self.config
        psi0 = initial_state(cfg.fock)
        logger.info(
            f"Run R={cfg.model.R:g}, lambda={cfg.model.lam:g}, delta={cfg.model.delta:g}, "
            f"mu={cfg.model.mu:g}, gamma={cfg.model.gamma:g}, n_max={cfg.fock.n_max}"
        )

        if self.is_dissipative:
            b, _ = build_ladder_ops(cfg.fock)
            states = evolve_lindblad(
                self.hamiltonian,
                b,
                JointDensityMatrix.from_state(psi0),
                cfg.model,
                cfg.plan,
                tail_tol=cfg.fock.tail_tol,
            )
            self.table = density_observables(
                states, cfg.model, outputs, reference=np.asarray(psi0.amps), **self._extras(outputs)
            )
            self._method = "lindblad_rk4"
        else:
            self.trajectory = evolve_unitary(
                self.hamiltonian, psi0, cfg.plan, tail_tol=cfg.fock.tail_tol
            )
            self.trajectory.metadata.update({"config": cfg.to_dict()})
            self.table = trajectory_observables(
                self.trajectory, cfg.model, outputs, **self._extras(outputs)
            )
            self._method = self.trajectory.metadata["method"]

        logger.info(f"Run finished: {self.table.height} samples, method={self._method}")
        return self.table

    def series(self, column: str) -> TimeSeries:
        if self.table is None:
            raise RuntimeError("Simulation has not been run")
        return TimeSeries.from_frame(self.table, column)

    def wigner_snapshot(
        self, time: float, grid: PhaseGridSpec | None = None, n_jobs: int = 1
    ) -> PhaseSpaceGrid:
        """
        Wigner distribution of the reduced oscillator state at ``time``.

        Unitary runs reuse the stored trajectory (running it first if needed);
        dissipative runs integrate up to ``time``.
        """
        grid = grid or PhaseGridSpec()
        if self.is_dissipative:
            cfg = self.config
            plan = replace(cfg.plan, t_max=max(time, cfg.plan.dt))
            b, _ = build_ladder_ops(cfg.fock)
            last = None
            for last in evolve_lindblad(
                self.hamiltonian,
                b,
                JointDensityMatrix.from_state(initial_state(cfg.fock)),
                cfg.model,
                plan,
                tail_tol=cfg.fock.tail_tol,
            ):
                pass
            state = last
        else:
            if self.trajectory is None or time > self.trajectory.times[-1] + 1e-12:
                if time > self.config.plan.t_max:
                    self.config = replace(
                        self.config, plan=replace(self.config.plan, t_max=time)
                    )
                self.run()
            state = self.trajectory.state_at(time)
        logger.info(f"Wigner snapshot at t={state.time:.6g} on a {grid.n_x}x{grid.n_p} grid")
        return wigner(reduce_oscillator(state), grid, self.params, n_jobs=n_jobs)

    def metadata(self, **extra: Any) -> dict[str, Any]:
        """Sidecar metadata: full config, truncation, propagator and version."""
        meta = {
            "config": self.config.to_dict(),
            "config_hash": self.config.config_hash(),
            "dimension": int(self.config.fock.dimension),
            "propagator": self.method,
            "rabicat_version": get_package_version(),
        }
        meta.update(extra)
        return meta

    def save(self, path: str | Path, **extra: Any) -> Path:
        """Write the observable table as CSV plus its metadata sidecar."""
        if self.table is None:
            raise RuntimeError("Simulation has not been run")
        path = write_csv(self.table, path)
        write_metadata(path, self.metadata(**extra))
        logger.info(f"Wrote {path}")
        return path


def simulate(config: RunConfig, outputs: tuple[str, ...] | None = None) -> pl.DataFrame:
    """Run a configuration and return its observable table."""
    return Simulation(config).run(outputs)


def wigner_from_hdf5(
    filepath: str | Path,
    time: float,
    grid: PhaseGridSpec | None = None,
    n_jobs: int = 1,
) -> PhaseSpaceGrid:
    """
    Wigner snapshot from a trajectory stored with ``StateTrajectory.to_hdf5``.

    The model parameters are read back from the stored run configuration.
    """
    traj = StateTrajectory.from_hdf5(filepath)
    config = traj.metadata.get("config")
    if not isinstance(config, dict):
        raise ValueError(f"Trajectory file {filepath} carries no run configuration")
    params = run_config_from_dict(config).model
    state = traj.state_at(time)
    return wigner(reduce_oscillator(state), grid or PhaseGridSpec(), params, n_jobs=n_jobs)
