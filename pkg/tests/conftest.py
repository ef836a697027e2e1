"""
Shared fixtures.

Small instances (R of a few units, n_max of a few tens) keep the unit tests
fast; the reference-size runs used by the ``slow`` tests are session scoped
so each is integrated once.
"""

import numpy as np
import pytest

from rabicat.config.run_config import RunConfig
from rabicat.dynamics.plan import PropagatorPlan
from rabicat.model.fock_space import FockConfig, JointState
from rabicat.model.rabi import ModelParams
from rabicat.simulation import Simulation

REFERENCE_PARAMS = ModelParams(R=100.0, lam=0.75, delta=0.5, mu=1.3e-3)
REFERENCE_OUTPUTS = ("t", "avg_x", "avg_p", "sigma_x", "sigma_z", "parity", "overlap", "purity", "p_left")


@pytest.fixture
def small_params():
    """Coupling in the saddle regime at a small size."""
    return ModelParams(R=4.0, lam=0.75, delta=0.5)


@pytest.fixture
def small_fock():
    return FockConfig(n_max=40)


@pytest.fixture
def short_plan():
    return PropagatorPlan(dt=0.1, t_max=2.0)


@pytest.fixture
def small_config(small_params, small_fock, short_plan):
    return RunConfig(model=small_params, fock=small_fock, plan=short_plan)


def make_state(down, up, n_max):
    """Normalized JointState from (possibly short) down/up amplitude lists."""
    amps = np.zeros(2 * (n_max + 1), dtype=complex)
    amps[: len(down)] = down
    amps[n_max + 1 : n_max + 1 + len(up)] = up
    amps /= np.linalg.norm(amps)
    return JointState(amps, n_max)


def coherent_amplitudes(alpha, n_max):
    """Fock amplitudes of a coherent state, built by recurrence."""
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    return amps


@pytest.fixture(scope="session")
def reference_run():
    """Unitary run at R=100, lambda=0.75, delta=0.5, mu=1.3e-3 up to t=30."""
    config = RunConfig(
        model=REFERENCE_PARAMS,
        fock=FockConfig.for_size(REFERENCE_PARAMS.R),
        plan=PropagatorPlan(dt=0.01, t_max=30.0),
        outputs=REFERENCE_OUTPUTS,
    )
    sim = Simulation(config)
    sim.run()
    return sim


@pytest.fixture(scope="session")
def symmetric_run():
    """Same as ``reference_run`` with mu = 0."""
    config = RunConfig(
        model=REFERENCE_PARAMS.with_mu(0.0),
        fock=FockConfig.for_size(REFERENCE_PARAMS.R),
        plan=PropagatorPlan(dt=0.01, t_max=40.0),
        outputs=REFERENCE_OUTPUTS,
    )
    sim = Simulation(config)
    sim.run()
    return sim
