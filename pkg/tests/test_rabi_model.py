"""
Unit tests for the extended Rabi Hamiltonian, parity and field vector.
"""

import math

import numpy as np
import pytest

from rabicat.model.effective import _radicand
from rabicat.model.fock_space import FockConfig, initial_state
from rabicat.model.rabi import (
    ModelParams,
    build_hamiltonian,
    build_parity,
    commutator_norm,
    field_vector,
)


class TestModelParams:
    def test_to_dict_uses_config_key_names(self):
        d = ModelParams(100.0, 0.75, 0.5, 1.3e-3).to_dict()
        assert d == {"R": 100.0, "lambda": 0.75, "delta": 0.5, "mu": 1.3e-3, "gamma": 0.0}

    def test_with_helpers(self):
        p = ModelParams(100.0, 0.75, 0.5, 1.3e-3)
        assert p.with_mu(-p.mu).mu == -1.3e-3
        assert p.with_gamma(0.1).gamma == 0.1
        q = p.with_size(1000.0, mu=1.3e-4)
        assert (q.R, q.mu, q.lam) == (1000.0, 1.3e-4, 0.75)

    def test_kappa(self):
        assert ModelParams(100.0, 0.75, 0.5, gamma=0.1).kappa == pytest.approx(1e-3)

    @pytest.mark.parametrize(
        "kwargs, field",
        [
            ({"R": 0.0}, "R"),
            ({"lam": -0.1}, "lambda"),
            ({"delta": 1.5}, "delta"),
            ({"gamma": -0.01}, "gamma"),
            ({"mu": math.nan}, "mu"),
        ],
    )
    def test_validation(self, kwargs, field):
        base = {"R": 100.0, "lam": 0.75, "delta": 0.5}
        base.update(kwargs)
        with pytest.raises(ValueError, match=field):
            ModelParams(**base)


class TestHamiltonian:
    def test_is_hermitian_with_expected_dimension(self):
        cfg = FockConfig(n_max=10)
        H = build_hamiltonian(ModelParams(4.0, 0.75, 0.5, 0.1), cfg)
        assert H.hermitian
        assert H.dimension == 22
        dense = H.toarray()
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-13)

    def test_rotating_matrix_element(self):
        H = build_hamiltonian(ModelParams(100.0, 0.75, 0.5), FockConfig(n_max=4))
        # <up,0| lam sqrt(R) (1+delta)/2 sigma_plus b |down,1> = 5.625 * 2
        assert H.toarray()[5, 1].real == pytest.approx(11.25)

    def test_counter_rotating_matrix_element(self):
        H = build_hamiltonian(ModelParams(100.0, 0.75, 0.5), FockConfig(n_max=4))
        # <up,1| lam sqrt(R) (1-delta)/2 sigma_plus b^dag |down,0> = 1.875 * 2
        assert H.toarray()[6, 0].real == pytest.approx(3.75)

    def test_diagonal(self):
        R = 10.0
        H = build_hamiltonian(ModelParams(R, 0.75, 0.5), FockConfig(n_max=3))
        np.testing.assert_allclose(
            H.toarray().diagonal().real, [-5.0, -4.0, -3.0, -2.0, 5.0, 6.0, 7.0, 8.0]
        )

    def test_mu_term_acts_on_up_only(self):
        cfg = FockConfig(n_max=3)
        params = ModelParams(100.0, 0.0, 0.0, mu=0.01)
        H = build_hamiltonian(params, cfg).toarray()
        # mu sqrt(R) (sz + 1) (b + b^dag): zero in the down block, 2 mu sqrt(R) sqrt(n) in the up block
        assert H[0, 1] == 0.0
        assert H[4, 5].real == pytest.approx(2 * 0.01 * 10.0)

    def test_initial_energy(self):
        params = ModelParams(100.0, 0.75, 0.5, 1.3e-3)
        cfg = FockConfig.for_size(params.R)
        H = build_hamiltonian(params, cfg)
        psi = initial_state(cfg)
        energy = np.vdot(psi.amps, H.matrix @ psi.amps).real
        assert energy == pytest.approx(-params.R / 2, rel=1e-12)


class TestParity:
    def test_diagonal_signs(self):
        P = build_parity(FockConfig(n_max=2)).toarray().diagonal().real
        np.testing.assert_array_equal(P, [1, -1, 1, -1, 1, -1])

    def test_commutes_with_hamiltonian_for_zero_mu(self):
        cfg = FockConfig(n_max=20)
        H = build_hamiltonian(ModelParams(4.0, 0.75, 0.5), cfg)
        assert commutator_norm(H, build_parity(cfg)) < 1e-12

    def test_broken_by_mu(self):
        cfg = FockConfig(n_max=20)
        H = build_hamiltonian(ModelParams(4.0, 0.75, 0.5, mu=0.01), cfg)
        assert commutator_norm(H, build_parity(cfg)) > 1e-3


class TestFieldVector:
    @pytest.mark.parametrize("x, p", [(0.0, 0.0), (0.3, -0.2), (-1.1, 0.7)])
    def test_magnitude_matches_radicand(self, x, p):
        params = ModelParams(100.0, 0.75, 0.5, 0.05)
        field = field_vector(x, p, params)
        assert field.magnitude_squared == pytest.approx(float(_radicand(x, p, params)), rel=1e-14)

    def test_origin(self):
        field = field_vector(0.0, 0.0, ModelParams(100.0, 0.75, 0.5))
        assert (field.bx, field.by, field.bz) == (0.0, 0.0, -0.5)
        assert field.magnitude == 0.5
