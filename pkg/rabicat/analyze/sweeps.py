"""
Parameter sweeps over the parity-breaking strength and the damping constant.

Sweep points are independent runs executed on a joblib worker pool. A
failing point is recorded with its error message and the sweep continues.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import polars as pl
from joblib import Parallel, delayed

from ..config.run_config import RunConfig
from ..dynamics.plan import PropagatorPlan
from ..model.fock_space import FockConfig
from ..model.rabi import ModelParams
from ..observables.series import TimeSeries
from ..simulation import simulate
from ..utils.logging_config import get_logger
from .collapse import EXIT_MARGIN, CollapseReport, detect_collapse

logger = get_logger(__name__)

SWEEP_OUTPUTS = ("t", "avg_x", "overlap", "p_left")


@dataclass(frozen=True)
class RunSpec:
    """
    Settings shared by every point of a sweep.

    Attributes
    ----------
    plan : PropagatorPlan
        Sampling grid and propagator.
    n_max : int, optional
        Fock truncation; ``ceil(4 R)`` when omitted.
    tail_tol : float
        Truncation tail tolerance.
    window : float, optional
        Collapse search window after the merge; one well period of each
        point's model when omitted.
    margin : float
        Exit-channel margin.
    """

    plan: PropagatorPlan = field(default_factory=PropagatorPlan)
    n_max: int | None = None
    tail_tol: float = 1e-8
    window: float | None = None
    margin: float = EXIT_MARGIN

    def config_for(self, params: ModelParams) -> RunConfig:
        fock = (
            FockConfig.for_size(params.R, self.tail_tol)
            if self.n_max is None
            else FockConfig(self.n_max, self.tail_tol)
        )
        return RunConfig(model=params, fock=fock, plan=self.plan, outputs=SWEEP_OUTPUTS)


@dataclass(frozen=True)
class PointResult:
    """Outcome of one sweep point."""

    value: float
    report: CollapseReport | None
    times: np.ndarray | None = None
    avg_x: np.ndarray | None = None
    error: str | None = None


def run_point(params: ModelParams, spec: RunSpec) -> tuple[CollapseReport, pl.DataFrame]:
    """
    Run one configuration and detect its collapse.

    Returns
    -------
    Tuple[CollapseReport, pl.DataFrame]
        Report and the observable table (``t``, ``avg_x``, ``overlap``, ``p_left``).
    """
    table = simulate(spec.config_for(params))
    report = detect_collapse(
        TimeSeries.from_frame(table, "avg_x"),
        TimeSeries.from_frame(table, "overlap"),
        TimeSeries.from_frame(table, "p_left"),
        window=spec.window,
        margin=spec.margin,
        params=params,
    )
    return report, table


def _sweep_point(value: float, params: ModelParams, spec: RunSpec, keep_series: bool) -> PointResult:
    try:
        report, table = run_point(params, spec)
    except (ValueError, RuntimeError, OverflowError) as e:
        return PointResult(value=value, report=None, error=f"{type(e).__name__}: {e}")
    if keep_series:
        return PointResult(value, report, table["t"].to_numpy(), table["avg_x"].to_numpy())
    return PointResult(value, report)


@dataclass
class SweepResult:
    """
    Collected sweep outcome, sorted by parameter value.

    Attributes
    ----------
    parameter : str
        Name of the swept parameter (``mu`` or ``gamma``).
    grid : np.ndarray
        Strictly increasing parameter values.
    points : List[PointResult]
        One result per grid value, same order.
    """

    parameter: str
    grid: np.ndarray
    points: list[PointResult]

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError(f"{self.parameter} grid must be strictly increasing")
        if len(self.points) != self.grid.size:
            raise ValueError("One point result per grid value required")

    @property
    def reports(self) -> list[CollapseReport | None]:
        return [p.report for p in self.points]

    @property
    def failures(self) -> dict[float, str]:
        return {p.value: p.error for p in self.points if p.error is not None}

    def depths(self) -> np.ndarray:
        return np.array([math.nan if r is None else r.depth for r in self.reports])

    def exit_channels(self) -> list[str]:
        return ["failed" if r is None else r.exit_channel for r in self.reports]

    def to_frame(self) -> pl.DataFrame:
        """One summary row per grid value."""
        rows = []
        for p in self.points:
            r = p.report or CollapseReport.none()
            rows.append(
                {
                    self.parameter: p.value,
                    "t_departure": r.t_departure,
                    "t_merge": r.t_merge,
                    "t_min": r.t_min,
                    "depth": r.depth,
                    "extreme_slope": r.extreme_slope,
                    "p_left": r.p_left,
                    "exit_channel": "failed" if p.report is None else r.exit_channel,
                    "error": p.error or "",
                }
            )
        return pl.DataFrame(rows)

    def map_frame(self) -> pl.DataFrame:
        """
        Long table ``(parameter, t, avg_x)`` of the stored series.

        Failed points are omitted.
        """
        frames = [
            pl.DataFrame(
                {
                    self.parameter: np.full(p.times.size, p.value),
                    "t": p.times,
                    "avg_x": p.avg_x,
                }
            )
            for p in self.points
            if p.times is not None
        ]
        if not frames:
            return pl.DataFrame(
                schema={self.parameter: pl.Float64, "t": pl.Float64, "avg_x": pl.Float64}
            )
        return pl.concat(frames)


def _run_sweep(
    parameter: str,
    values: Sequence[float],
    make_params,
    spec: RunSpec,
    n_jobs: int,
    keep_series: bool,
) -> SweepResult:
    grid = np.unique(np.asarray(values, dtype=float))
    if grid.size != len(values):
        logger.warning(f"Duplicate {parameter} values removed from sweep grid")
    logger.info(f"Sweep over {parameter}: {grid.size} points, n_jobs={n_jobs}")

    jobs = (delayed(_sweep_point)(v, make_params(v), spec, keep_series) for v in grid)
    points = Parallel(n_jobs=n_jobs)(jobs)
    points = sorted(points, key=lambda p: p.value)

    for p in points:
        if p.error is not None:
            logger.warning(f"Sweep point {parameter}={p.value:g} failed: {p.error}")
    logger.info(f"Sweep over {parameter} finished, {sum(p.error is not None for p in points)} failures")
    return SweepResult(parameter=parameter, grid=grid, points=list(points))


def sweep_mu(
    base: ModelParams,
    mu_grid: Sequence[float],
    spec: RunSpec | None = None,
    n_jobs: int = 1,
    keep_series: bool = True,
) -> SweepResult:
    """
    Sweep the parity-breaking strength.

    Parameters
    ----------
    base : ModelParams
        Parameters whose ``mu`` is replaced per point.
    mu_grid : Sequence[float]
        Values of mu; sorted and deduplicated.
    spec : RunSpec, optional
        Shared run settings.
    n_jobs : int
        joblib workers.
    keep_series : bool
        Keep the ``<x>(t)`` rows for the map table.

    Returns
    -------
    SweepResult
        Per-mu collapse reports and series.
    """
    return _run_sweep("mu", mu_grid, base.with_mu, spec or RunSpec(), n_jobs, keep_series)


def sweep_gamma(
    base: ModelParams,
    gamma_grid: Sequence[float],
    spec: RunSpec | None = None,
    n_jobs: int = 1,
    keep_series: bool = True,
) -> SweepResult:
    """
    Sweep the damping constant; ``gamma = 0`` runs unitarily, others through
    the master equation.
    """
    if any(g < 0 for g in gamma_grid):
        raise ValueError(f"gamma values must be non-negative, got {list(gamma_grid)}")
    return _run_sweep("gamma", gamma_grid, base.with_gamma, spec or RunSpec(), n_jobs, keep_series)


def log_mu_grid(mu_min: float = 1e-4, mu_max: float = 0.2, points: int = 200) -> np.ndarray:
    """Log-spaced mu grid, 200 points over [1e-4, 0.2] by default."""
    if not 0 < mu_min < mu_max:
        raise ValueError(f"Need 0 < mu_min < mu_max, got {mu_min}, {mu_max}")
    if points < 2:
        raise ValueError(f"Need at least 2 grid points, got {points}")
    return np.geomspace(mu_min, mu_max, points)


def count_channel_alternations(channels: Sequence[str]) -> int:
    """Number of left/right switches along a sweep, ignoring ``none`` entries."""
    decided = [c for c in channels if c in ("left", "right")]
    return sum(a != b for a, b in zip(decided, decided[1:], strict=False))
