"""
Tests for the loop interferometer analog.
"""

import math

import numpy as np
import pytest

from rabicat.interferometer import (
    InterferometerSpec,
    exit_amplitudes,
    exit_amplitudes_oracle,
    exit_probabilities,
    scan_table,
)


class TestInterferometerSpec:
    def test_total_phase(self):
        assert InterferometerSpec(10, 0.05).total_phase == pytest.approx(0.5)

    @pytest.mark.parametrize("n_cycles, dphi", [(-1, 0.1), (1.5, 0.1), (3, math.nan), (3, math.inf)])
    def test_validation(self, n_cycles, dphi):
        with pytest.raises(ValueError):
            InterferometerSpec(n_cycles, dphi)


class TestExitAmplitudes:
    def test_matches_transfer_matrices(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            spec = InterferometerSpec(int(rng.integers(0, 50)), float(rng.uniform(-math.pi, math.pi)))
            closed = np.abs(exit_amplitudes(spec))
            oracle = np.abs(exit_amplitudes_oracle(spec))
            np.testing.assert_allclose(oracle, closed, atol=1e-12)

    def test_balanced_without_phase(self):
        p_left, p_right = exit_probabilities(InterferometerSpec(7, 0.0))
        assert p_left == pytest.approx(0.5)
        assert p_right == pytest.approx(0.5)

    def test_quarter_turn_exits_right(self):
        p_left, p_right = exit_probabilities(InterferometerSpec(1, math.pi / 2))
        assert p_left == pytest.approx(0.0, abs=1e-15)
        assert p_right == pytest.approx(1.0)

    def test_three_quarter_turn_exits_left(self):
        p_left, p_right = exit_probabilities(InterferometerSpec(3, math.pi / 2))
        assert p_left == pytest.approx(1.0)
        assert p_right == pytest.approx(0.0, abs=1e-15)

    def test_small_phase_bias_grows_with_cycles(self):
        biases = [exit_probabilities(InterferometerSpec(n, 0.01))[1] - 0.5 for n in (1, 10, 100)]
        assert 0 < biases[0] < biases[1] < biases[2]

    def test_full_turn_periodicity(self):
        a = exit_probabilities(InterferometerSpec(1, 0.4))
        b = exit_probabilities(InterferometerSpec(1, 0.4 + 2 * math.pi))
        np.testing.assert_allclose(a, b, atol=1e-12)


class TestScanTable:
    def test_columns_and_normalization(self):
        phases = np.linspace(0.0, 2 * math.pi / 10, 21)
        df = scan_table(10, phases)
        assert df.columns == ["n_dphi", "P_left", "P_right"]
        assert df.height == 21
        np.testing.assert_allclose(df["n_dphi"].to_numpy(), 10 * phases)
        np.testing.assert_allclose((df["P_left"] + df["P_right"]).to_numpy(), 1.0)

    def test_empty_scan(self):
        df = scan_table(5, [])
        assert df.height == 0
        assert df.columns == ["n_dphi", "P_left", "P_right"]
