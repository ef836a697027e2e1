"""
Command-line entry point ``rabicat``.

Every subcommand writes one or more CSV tables, each with a YAML metadata
sidecar sufficient to reproduce it.

Examples
--------
    rabicat evolve --R 100 --lambda 0.75 --delta 0.5 --mu 1.3e-3 --out cat.csv
    rabicat wigner --config cat.cfg --time 7.5 --out w75.csv
    rabicat sweep-mu --R 100 --lambda 0.75 --delta 0.5 --tmax 25 --jobs 8
    rabicat scaling --lambda 0.75 --delta 0.5 --R-list 100,1000
    rabicat interferometer --n-cycles 10
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .analyze.scaling import MU_COEFFICIENT, scaling_study
from .analyze.sweeps import RunSpec, log_mu_grid, sweep_gamma, sweep_mu
from .config.defaults import FLAG_TO_KEY
from .config.run_config import RunConfig, load_config
from .errors import ConfigError
from .interferometer import scan_table
from .model.effective import classify_origin, effective_surface
from .model.rabi import ModelParams
from .observables.phase_space import PhaseGridSpec
from .simulation import Simulation, wigner_from_hdf5
from .utils.logging_config import get_logger, setup_logging
from .utils.tools import write_csv, write_metadata

logger = get_logger(__name__)

DEFAULT_GAMMAS = "0,0.01,0.03,0.05,0.1"
DEFAULT_SIZES = "100,1000"


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got '{text}'") from e


def _sibling(path: Path, suffix: str) -> Path:
    """``runs/a.csv`` -> ``runs/a_<suffix>.csv``."""
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model")
    group.add_argument("--config", type=Path, default=None, help="key=value or YAML run config")
    group.add_argument("--R", type=float, default=None, help="Size parameter R")
    group.add_argument("--lambda", dest="lam", type=float, default=None, help="Coupling lambda")
    group.add_argument("--delta", type=float, default=None, help="Coupling mixing delta in [-1, 1]")
    group.add_argument("--mu", type=float, default=None, help="Parity-breaking strength")
    group.add_argument("--gamma", type=float, default=None, help="Oscillator damping (units of omega)")

    group = parser.add_argument_group("numerics")
    group.add_argument("--nmax", type=int, default=None, help="Fock truncation (default ceil(4R))")
    group.add_argument("--tail-tol", dest="tail_tol", type=float, default=None)
    group.add_argument(
        "--method", choices=["auto", "eigendecomposition", "krylov"], default=None
    )
    group.add_argument("--dt", type=float, default=None, help="Output sampling step")
    group.add_argument("--tmax", type=float, default=None, help="Final time (units of 1/omega)")
    group.add_argument("--krylov-dim", dest="krylov_dim", type=int, default=None)
    group.add_argument("--step-tol", dest="step_tol", type=float, default=None)


def _add_output_flags(parser: argparse.ArgumentParser, default_out: str, jobs: bool = False) -> None:
    parser.add_argument("--out", type=Path, default=Path(default_out), help="Output CSV path")
    if jobs:
        parser.add_argument("--jobs", type=int, default=1, help="Parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabicat",
        description="Cat-state birth and death in the extended Rabi model.",
    )
    parser.add_argument("--log-level", default="INFO", help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--log-file", type=Path, default=None, help="Also log to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="Observable time series of one run")
    _add_model_flags(p)
    _add_output_flags(p, "evolve.csv")
    p.add_argument("--states-h5", type=Path, default=None, help="Also store the state trajectory")

    p = sub.add_parser("wigner", help="Wigner snapshot of the oscillator")
    _add_model_flags(p)
    _add_output_flags(p, "wigner.csv", jobs=True)
    p.add_argument("--time", type=float, default=7.5, help="Snapshot time")
    p.add_argument("--states-h5", type=Path, default=None, help="Read states from a stored trajectory")
    p.add_argument("--grid-points", type=int, default=256, help="Points per axis")
    p.add_argument("--extent", type=float, default=2.0, help="Grid covers [-extent, extent]^2")

    p = sub.add_parser("sweep-mu", help="Collapse reports over a log-spaced mu grid")
    _add_model_flags(p)
    _add_output_flags(p, "sweep_mu.csv", jobs=True)
    p.add_argument("--mu-min", type=float, default=1e-4)
    p.add_argument("--mu-max", type=float, default=0.2)
    p.add_argument("--mu-points", type=int, default=200)

    p = sub.add_parser("sweep-gamma", help="Collapse reports over damping constants")
    _add_model_flags(p)
    _add_output_flags(p, "sweep_gamma.csv", jobs=True)
    p.add_argument("--gamma-list", type=_float_list, default=_float_list(DEFAULT_GAMMAS))

    p = sub.add_parser("scaling", help="Time dilation and slope growth across sizes")
    _add_model_flags(p)
    _add_output_flags(p, "scaling.csv", jobs=True)
    p.add_argument("--R-list", dest="R_list", type=_float_list, default=_float_list(DEFAULT_SIZES))
    p.add_argument("--mu-coefficient", type=float, default=MU_COEFFICIENT, help="mu * R per size")

    p = sub.add_parser("effective", help="Classical energy surfaces and origin stability")
    _add_model_flags(p)
    _add_output_flags(p, "effective.csv")
    p.add_argument("--grid-points", type=int, default=201, help="Points per axis")
    p.add_argument("--extent", type=float, default=1.5, help="Grid covers [-extent, extent]^2")

    p = sub.add_parser("interferometer", help="Exit probabilities of the optical loop analog")
    _add_output_flags(p, "interferometer.csv")
    p.add_argument("--n-cycles", type=int, default=10)
    p.add_argument("--phase-points", type=int, default=201)

    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {key: getattr(args, flag, None) for flag, key in FLAG_TO_KEY.items()}


def _load(args: argparse.Namespace, **fallback: Any) -> RunConfig:
    """Config file plus flags; ``fallback`` fills keys neither provides."""
    overrides = _overrides(args)
    for key, value in fallback.items():
        if overrides.get(key) is None and args.config is None:
            overrides[key] = value
    return load_config(args.config, overrides)


def _run_spec(config: RunConfig, args: argparse.Namespace, fixed_nmax: bool = True) -> RunSpec:
    return RunSpec(
        plan=config.plan,
        n_max=config.fock.n_max if fixed_nmax else args.nmax,
        tail_tol=config.fock.tail_tol,
    )


def run_evolve(args: argparse.Namespace) -> int:
    config = _load(args)
    sim = Simulation(config)
    sim.run()
    sim.save(args.out)
    if args.states_h5 is not None:
        if sim.trajectory is None:
            logger.warning("State trajectories are stored for unitary runs only; skipping HDF5")
        else:
            sim.trajectory.to_hdf5(args.states_h5)
            logger.info(f"Wrote {args.states_h5}")
    return 0


def run_wigner(args: argparse.Namespace) -> int:
    spec = PhaseGridSpec(
        x_min=-args.extent,
        x_max=args.extent,
        p_min=-args.extent,
        p_max=args.extent,
        n_x=args.grid_points,
        n_p=args.grid_points,
    )
    if args.states_h5 is not None and args.config is None and args.R is None:
        grid = wigner_from_hdf5(args.states_h5, args.time, spec, n_jobs=args.jobs)
        meta = {"source": str(args.states_h5)}
    else:
        sim = Simulation(_load(args))
        grid = sim.wigner_snapshot(args.time, spec, n_jobs=args.jobs)
        meta = sim.metadata()

    path = write_csv(grid.to_frame(), args.out)
    meta.update(
        {
            "time": float(args.time),
            "grid": {"extent": float(args.extent), "points": int(args.grid_points)},
            "normalization": float(grid.normalization),
        }
    )
    write_metadata(path, meta)
    logger.info(f"Wrote {path} (normalization {grid.normalization:.6f})")
    return 0


def _write_sweep(result, config: RunConfig, args: argparse.Namespace) -> None:
    meta = {
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "parameter": result.parameter,
        "grid": [float(v) for v in result.grid],
    }
    path = write_csv(result.to_frame(), args.out)
    write_metadata(path, meta)
    map_path = write_csv(result.map_frame(), _sibling(path, "map"))
    write_metadata(map_path, meta)
    logger.info(f"Wrote {path} and {map_path}")
    if result.failures:
        logger.warning(f"{len(result.failures)} sweep points failed")


def run_sweep_mu(args: argparse.Namespace) -> int:
    config = _load(args)
    grid = log_mu_grid(args.mu_min, args.mu_max, args.mu_points)
    result = sweep_mu(config.model, grid, _run_spec(config, args), n_jobs=args.jobs)
    _write_sweep(result, config, args)
    return 0


def run_sweep_gamma(args: argparse.Namespace) -> int:
    config = _load(args)
    result = sweep_gamma(config.model, args.gamma_list, _run_spec(config, args), n_jobs=args.jobs)
    _write_sweep(result, config, args)
    return 0


def run_scaling(args: argparse.Namespace) -> int:
    config = _load(args, R=min(args.R_list))
    study = scaling_study(
        config.model,
        args.R_list,
        _run_spec(config, args, fixed_nmax=False),
        mu_coefficient=args.mu_coefficient,
        n_jobs=args.jobs,
    )
    meta = {
        "config": config.to_dict(),
        "R_list": sorted(float(r) for r in args.R_list),
        "mu_coefficient": float(args.mu_coefficient),
        "fit": study.fit.to_dict() if study.fit is not None else None,
    }
    path = write_csv(study.table, args.out)
    write_metadata(path, meta)
    series_path = write_csv(study.series, _sibling(path, "series"))
    write_metadata(series_path, meta)
    logger.info(f"Wrote {path} and {series_path}")
    return 0


def run_effective(args: argparse.Namespace) -> int:
    config = _load(args, R=1.0)
    params: ModelParams = config.model
    report = classify_origin(params)
    logger.info(
        f"Origin: {report.kind}, |Lambda|={report.lambda_abs:.10g}, shift={report.shift:.3e}"
    )
    axis = np.linspace(-args.extent, args.extent, args.grid_points)
    path = write_csv(effective_surface(params, axis, axis), args.out)
    write_metadata(
        path,
        {
            "model": params.to_dict(),
            "grid": {"extent": float(args.extent), "points": int(args.grid_points)},
            "origin": report.to_dict(),
        },
    )
    logger.info(f"Wrote {path}")
    return 0


def run_interferometer(args: argparse.Namespace) -> int:
    if args.n_cycles < 0:
        raise ConfigError("must be non-negative", field="n_cycles")
    period = 2.0 * math.pi / max(args.n_cycles, 1)
    phases = np.linspace(0.0, period, args.phase_points)
    path = write_csv(scan_table(args.n_cycles, phases), args.out)
    write_metadata(path, {"n_cycles": int(args.n_cycles), "phase_points": int(args.phase_points)})
    logger.info(f"Wrote {path}")
    return 0


COMMANDS = {
    "evolve": run_evolve,
    "wigner": run_wigner,
    "sweep-mu": run_sweep_mu,
    "sweep-gamma": run_sweep_gamma,
    "scaling": run_scaling,
    "effective": run_effective,
    "interferometer": run_interferometer,
}


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments and dispatch a subcommand.

    Returns
    -------
    int
        0 on success, 2 on configuration errors, 1 on run errors.
    """
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level, log_file=args.log_file)

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError) as e:
        logger.error(f"Configuration error: {e}")
        return 2
    except (ValueError, RuntimeError, OverflowError) as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
