"""
Tests for the Lindblad master-equation integrator.
"""

import math

import numpy as np
import pytest

from rabicat.dynamics.evolution import evolve_unitary
from rabicat.dynamics.lindblad import JointDensityMatrix, _LindbladRHS, evolve_lindblad
from rabicat.dynamics.plan import PropagatorPlan
from rabicat.errors import TruncationError
from rabicat.model.fock_space import (
    FockConfig,
    basis_state,
    build_ladder_ops,
    identity_op,
    initial_state,
    pauli_ops,
    tensor,
)
from rabicat.model.rabi import ModelParams, build_hamiltonian


class TestJointDensityMatrix:
    def test_from_state(self):
        cfg = FockConfig(n_max=3)
        rho = JointDensityMatrix.from_state(initial_state(cfg))
        assert rho.trace() == pytest.approx(1.0)
        assert rho.rho[0, 0] == 1.0
        assert rho.min_eigenvalue() == pytest.approx(0.0, abs=1e-12)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            JointDensityMatrix(0.5 * np.eye(4), n_max=1)

    def test_rejects_non_hermitian(self):
        rho = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
        rho[0, 1] = 0.1
        with pytest.raises(ValueError, match="hermitian"):
            JointDensityMatrix(rho, n_max=1)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="shape"):
            JointDensityMatrix(np.eye(3) / 3, n_max=1)

    def test_tail_weight_counts_top_five_percent(self):
        cfg = FockConfig(n_max=20)
        assert JointDensityMatrix.from_state(basis_state(cfg, 1, 20)).tail_weight() == 1.0
        assert JointDensityMatrix.from_state(basis_state(cfg, 1, 19)).tail_weight() == 0.0

    def test_default_trace_tolerance(self):
        rho = np.diag([1.0 + 5e-8, 0.0, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError, match="trace"):
            JointDensityMatrix(rho, n_max=1)
        assert JointDensityMatrix(rho, n_max=1, trace_tol=1e-6).trace() == pytest.approx(1.0, abs=1e-7)


class TestEvolveLindblad:
    def test_is_lazy_generator(self, small_params, small_fock):
        H = build_hamiltonian(small_params, small_fock)
        b, _ = build_ladder_ops(small_fock)
        states = evolve_lindblad(
            H,
            b,
            JointDensityMatrix.from_state(initial_state(small_fock)),
            small_params.with_gamma(0.1),
            PropagatorPlan(dt=0.1, t_max=1.0),
        )
        first = next(states)
        assert first.time == 0.0
        assert first.rho[0, 0] == pytest.approx(1.0)

    def test_zero_damping_matches_unitary(self):
        params = ModelParams(4.0, 0.75, 0.5)
        cfg = FockConfig(n_max=20)
        H = build_hamiltonian(params, cfg)
        b, _ = build_ladder_ops(cfg)
        plan = PropagatorPlan(dt=0.1, t_max=1.0, step_tol=1e-11)
        psi0 = initial_state(cfg)

        traj = evolve_unitary(H, psi0, plan, tail_tol=1e-2)
        states = list(
            evolve_lindblad(H, b, JointDensityMatrix.from_state(psi0), params, plan, tail_tol=1e-2)
        )
        assert len(states) == len(traj)
        for state, amps in zip(states, traj.amps, strict=True):
            np.testing.assert_allclose(state.rho, np.outer(amps, amps.conj()), atol=1e-8)

    def test_free_decay_of_one_photon(self):
        # lambda = 0 leaves H diagonal; the n=1 population decays at rate gamma / R
        params = ModelParams(2.0, 0.0, 0.0, gamma=0.5)
        cfg = FockConfig(n_max=6)
        H = build_hamiltonian(params, cfg)
        b, _ = build_ladder_ops(cfg)
        rho0 = JointDensityMatrix.from_state(basis_state(cfg, 0, 1))
        states = list(
            evolve_lindblad(H, b, rho0, params, PropagatorPlan(dt=0.5, t_max=4.0, step_tol=1e-10), tail_tol=0.5)
        )
        kappa = params.kappa
        for state in states:
            assert state.rho[1, 1].real == pytest.approx(math.exp(-kappa * state.time), abs=1e-7)
            assert state.rho[0, 0].real == pytest.approx(1 - math.exp(-kappa * state.time), abs=1e-7)

    def test_trace_and_positivity_preserved(self, small_params, small_fock):
        params = small_params.with_gamma(0.5)
        H = build_hamiltonian(params, small_fock)
        b, _ = build_ladder_ops(small_fock)
        states = list(
            evolve_lindblad(
                H,
                b,
                JointDensityMatrix.from_state(initial_state(small_fock)),
                params,
                PropagatorPlan(dt=0.2, t_max=2.0),
            )
        )
        for state in states:
            assert state.trace() == pytest.approx(1.0, abs=1e-8)
        assert states[-1].min_eigenvalue() > -1e-6
        # Damping mixes the joint state
        assert np.sum(np.abs(states[-1].rho) ** 2) < 1.0 - 1e-4

    def test_accepts_joint_jump_operator(self):
        params = ModelParams(2.0, 0.0, 0.0, gamma=0.5)
        cfg = FockConfig(n_max=4)
        H = build_hamiltonian(params, cfg)
        b, _ = build_ladder_ops(cfg)
        B = tensor(identity_op(2), b)
        rho0 = JointDensityMatrix.from_state(basis_state(cfg, 0, 1))
        plan = PropagatorPlan(dt=0.5, t_max=1.0)
        a = list(evolve_lindblad(H, b, rho0, params, plan, tail_tol=0.5))
        c = list(evolve_lindblad(H, B, rho0, params, plan, tail_tol=0.5))
        np.testing.assert_array_equal(a[-1].rho, c[-1].rho)

    def test_rejects_mismatched_jump_operator(self, small_params, small_fock):
        H = build_hamiltonian(small_params, small_fock)
        b, _ = build_ladder_ops(FockConfig(n_max=7))
        states = evolve_lindblad(
            H,
            b,
            JointDensityMatrix.from_state(initial_state(small_fock)),
            small_params,
            PropagatorPlan(dt=0.1, t_max=0.2),
        )
        with pytest.raises(ValueError, match="incompatible"):
            next(states)

    def test_truncation_error(self):
        params = ModelParams(10.0, 0.75, 0.5, gamma=0.1)
        cfg = FockConfig(n_max=4)
        H = build_hamiltonian(params, cfg)
        b, _ = build_ladder_ops(cfg)
        with pytest.raises(TruncationError):
            list(
                evolve_lindblad(
                    H,
                    b,
                    JointDensityMatrix.from_state(initial_state(cfg)),
                    params,
                    PropagatorPlan(dt=0.1, t_max=5.0),
                )
            )


def _mixing_jump_operator(cfg):
    """``1 (x) b + sigma_x (x) 1``, whose ``B^dag B`` has off-diagonal entries."""
    b, _ = build_ladder_ops(cfg)
    sx = pauli_ops()[0]
    return tensor(identity_op(2), b) + tensor(sx, identity_op(cfg.n_levels))


class TestGeneralJumpOperator:
    def test_rhs_matches_dense_master_equation(self):
        params = ModelParams(2.0, 0.5, 0.5, gamma=0.5)
        cfg = FockConfig(n_max=4)
        H = build_hamiltonian(params, cfg)
        B = _mixing_jump_operator(cfg)
        bdb = B.toarray().conj().T @ B.toarray()
        assert np.max(np.abs(bdb - np.diag(bdb.diagonal()))) > 0.5

        rng = np.random.default_rng(7)
        a = rng.normal(size=(cfg.dimension,) * 2) + 1j * rng.normal(size=(cfg.dimension,) * 2)
        rho = a @ a.conj().T
        rho /= np.trace(rho)

        h, m = H.toarray(), B.toarray()
        kappa = params.kappa
        expected = -1j * (h @ rho - rho @ h) + kappa * (
            m @ rho @ m.conj().T - 0.5 * (bdb @ rho + rho @ bdb)
        )
        np.testing.assert_allclose(_LindbladRHS(H, B, kappa)(rho), expected, atol=1e-12)

    def test_trace_preserved_with_mixing_jump(self):
        params = ModelParams(2.0, 0.5, 0.5, gamma=0.5)
        cfg = FockConfig(n_max=4)
        H = build_hamiltonian(params, cfg)
        states = list(
            evolve_lindblad(
                H,
                _mixing_jump_operator(cfg),
                JointDensityMatrix.from_state(initial_state(cfg)),
                params,
                PropagatorPlan(dt=0.2, t_max=1.0),
                tail_tol=1.0,
            )
        )
        assert len(states) == 6
        for state in states:
            assert state.trace_tol == 1e-8
            assert state.trace() == pytest.approx(1.0, abs=1e-10)
        assert states[-1].min_eigenvalue() > -1e-6
