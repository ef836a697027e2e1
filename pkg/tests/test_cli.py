"""
Tests for the ``rabicat`` command line.
"""

import math

import polars as pl
import pytest

from rabicat.cli import COMMANDS, build_parser, main
from rabicat.dynamics.evolution import StateTrajectory
from rabicat.utils.tools import metadata_path_for, read_metadata

SMALL_RUN = ["--R", "4", "--lambda", "0.75", "--delta", "0.5", "--nmax", "40", "--dt", "0.1"]


class TestParser:
    def test_every_subcommand_is_dispatched(self):
        parser = build_parser()
        choices = parser._subparsers._group_actions[0].choices
        assert set(choices) == set(COMMANDS)

    def test_model_flags(self):
        args = build_parser().parse_args(["evolve", *SMALL_RUN, "--mu", "1e-3", "--tmax", "2"])
        assert args.R == 4.0
        assert args.lam == 0.75
        assert args.mu == 1e-3
        assert args.nmax == 40
        assert args.tmax == 2.0
        assert args.gamma is None

    def test_list_flags(self):
        args = build_parser().parse_args(["scaling", "--R-list", "100, 316.2,1000"])
        assert args.R_list == [100.0, 316.2, 1000.0]
        args = build_parser().parse_args(["sweep-gamma"])
        assert args.gamma_list == [0.0, 0.01, 0.03, 0.05, 0.1]

    def test_bad_list_exits(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["scaling", "--R-list", "100,big"])

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestEvolve:
    def test_writes_table_and_sidecar(self, tmp_path):
        out = tmp_path / "evolve.csv"
        code = main(["evolve", *SMALL_RUN, "--mu", "0.05", "--tmax", "2", "--out", str(out)])
        assert code == 0
        df = pl.read_csv(out)
        assert df.columns == ["t", "avg_x", "avg_p", "sigma_x", "sigma_z", "parity", "overlap", "purity"]
        assert df.height == 21
        meta = read_metadata(out)
        assert meta["config"]["model"]["mu"] == 0.05
        assert meta["config"]["fock"]["n_max"] == 40
        assert meta["propagator"] == "eigendecomposition"

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("[model]\nR=4, lambda=0.75, delta=0.5\n[fock]\nn_max=40\n[plan]\ndt=0.1, t_max=2\n[outputs]\noutputs=t, overlap\n")
        out = tmp_path / "evolve.csv"
        assert main(["evolve", "--config", str(config), "--tmax", "1", "--out", str(out)]) == 0
        df = pl.read_csv(out)
        assert df.columns == ["t", "overlap"]
        assert df["t"][-1] == pytest.approx(1.0)

    def test_states_h5(self, tmp_path):
        out = tmp_path / "evolve.csv"
        states = tmp_path / "states.h5"
        args = ["evolve", *SMALL_RUN, "--tmax", "1", "--out", str(out), "--states-h5", str(states)]
        assert main(args) == 0
        traj = StateTrajectory.from_hdf5(states)
        assert len(traj) == 11
        assert traj.metadata["config"]["model"]["R"] == 4.0

    def test_missing_required_parameter(self, tmp_path):
        code = main(["evolve", "--lambda", "0.75", "--delta", "0.5", "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert not (tmp_path / "x.csv").exists()

    def test_missing_config_file(self, tmp_path):
        assert main(["evolve", "--config", str(tmp_path / "absent.cfg")]) == 2

    def test_truncation_failure_exit_code(self, tmp_path):
        args = ["evolve", "--R", "10", "--lambda", "0.75", "--delta", "0.5", "--nmax", "4", "--dt", "0.1", "--tmax", "5"]
        assert main([*args, "--out", str(tmp_path / "x.csv")]) == 1


class TestWigner:
    def test_live_snapshot(self, tmp_path):
        out = tmp_path / "w.csv"
        args = ["wigner", *SMALL_RUN, "--tmax", "1", "--time", "1.0", "--grid-points", "17", "--out", str(out)]
        assert main(args) == 0
        df = pl.read_csv(out)
        assert df.columns == ["x", "p", "W"]
        assert df.height == 17 * 17
        meta = read_metadata(out)
        assert meta["time"] == 1.0
        assert meta["grid"] == {"extent": 2.0, "points": 17}
        assert "normalization" in meta

    def test_snapshot_from_stored_states(self, tmp_path):
        states = tmp_path / "states.h5"
        main(["evolve", *SMALL_RUN, "--tmax", "1", "--out", str(tmp_path / "e.csv"), "--states-h5", str(states)])
        out = tmp_path / "w.csv"
        args = ["wigner", "--states-h5", str(states), "--time", "0.5", "--grid-points", "9", "--out", str(out)]
        assert main(args) == 0
        assert read_metadata(out)["source"] == str(states)
        assert pl.read_csv(out).height == 81


class TestSweeps:
    def test_sweep_mu_writes_summary_and_map(self, tmp_path):
        out = tmp_path / "sweep.csv"
        args = [
            "sweep-mu",
            *SMALL_RUN,
            "--tmax",
            "2",
            "--mu-min",
            "0.01",
            "--mu-max",
            "0.1",
            "--mu-points",
            "3",
            "--out",
            str(out),
        ]
        assert main(args) == 0
        summary = pl.read_csv(out)
        assert summary.height == 3
        assert summary.columns[0] == "mu"
        long = pl.read_csv(tmp_path / "sweep_map.csv")
        assert long.columns == ["mu", "t", "avg_x"]
        assert long.height == 3 * 21
        assert metadata_path_for(tmp_path / "sweep_map.csv").exists()
        assert read_metadata(out)["parameter"] == "mu"

    def test_sweep_gamma(self, tmp_path):
        out = tmp_path / "gamma.csv"
        args = [
            "sweep-gamma",
            "--R",
            "4",
            "--lambda",
            "0.75",
            "--delta",
            "0.5",
            "--nmax",
            "20",
            "--tail-tol",
            "1e-2",
            "--dt",
            "0.25",
            "--tmax",
            "1",
            "--gamma-list",
            "0,0.1",
            "--out",
            str(out),
        ]
        assert main(args) == 0
        assert pl.read_csv(out)["gamma"].to_list() == [0.0, 0.1]

    def test_negative_gamma_exit_code(self, tmp_path):
        args = ["sweep-gamma", *SMALL_RUN, "--gamma-list", "-0.1", "--out", str(tmp_path / "g.csv")]
        assert main(args) == 1


class TestEffective:
    def test_surface_and_origin_report(self, tmp_path):
        out = tmp_path / "eff.csv"
        args = ["effective", "--lambda", "0.75", "--delta", "0.5", "--grid-points", "11", "--out", str(out)]
        assert main(args) == 0
        df = pl.read_csv(out)
        assert df.columns == ["x", "p", "h_up", "h_down"]
        assert df.height == 121
        origin = read_metadata(out)["origin"]
        assert origin["kind"] == "saddle"
        assert origin["lambda_abs"] == pytest.approx(math.sqrt(35.0) / 8.0)


class TestInterferometer:
    def test_scan(self, tmp_path):
        out = tmp_path / "loop.csv"
        assert main(["interferometer", "--n-cycles", "4", "--phase-points", "9", "--out", str(out)]) == 0
        df = pl.read_csv(out)
        assert df.height == 9
        assert df["n_dphi"][-1] == pytest.approx(2 * math.pi)
        assert df["P_left"][0] == pytest.approx(0.5)

    def test_negative_cycles(self, tmp_path):
        out = tmp_path / "loop.csv"
        assert main(["interferometer", "--n-cycles", "-1", "--out", str(out)]) == 2
