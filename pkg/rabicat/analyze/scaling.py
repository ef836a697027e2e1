"""
Size scaling of the collapse: time dilation between system sizes and the
logarithmic growth of the extreme slope.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import polars as pl
from joblib import Parallel, delayed

from ..model.effective import ScalingLaw, scaling_constant, slope_prediction, tau_from_scaling
from ..model.rabi import ModelParams
from ..observables.series import TimeSeries
from ..utils.logging_config import get_logger
from .collapse import first_deep_extremum, rescale_time
from .sweeps import RunSpec, run_point

logger = get_logger(__name__)

MU_COEFFICIENT = 0.13


@dataclass(frozen=True)
class SlopeFit:
    """
    Least-squares line ``slope = a log10(R) + b``.

    Attributes
    ----------
    a, b : float
        Coefficients.
    residuals : np.ndarray
        Per-point residuals ``slope - (a log10 R + b)``.
    """

    a: float
    b: float
    residuals: np.ndarray

    def predict(self, R) -> np.ndarray:
        return self.a * np.log10(np.asarray(R, dtype=float)) + self.b

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "residuals": [float(r) for r in self.residuals]}


def fit_slope_vs_logR(points: Sequence[tuple[float, float]]) -> SlopeFit:
    """
    Fit extreme slopes against ``log10 R`` by ordinary least squares.

    Parameters
    ----------
    points : Sequence[Tuple[float, float]]
        ``(R, extreme_slope)`` pairs.

    Returns
    -------
    SlopeFit
        Coefficients and residuals.

    Raises
    ------
    ValueError
        With fewer than three points, repeated or nonpositive R, or a rank
        deficient design matrix.

    Examples
    --------
    >>> fit = fit_slope_vs_logR([(100, -0.22), (1000, -0.27), (10000, -0.32)])
    >>> round(fit.a, 6), round(fit.b, 6)
    (-0.05, -0.12)
    """
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"points must be (R, slope) pairs, got shape {data.shape}")
    if data.shape[0] < 3:
        raise ValueError(f"Need at least 3 points for the slope fit, got {data.shape[0]}")
    R, slope = data[:, 0], data[:, 1]
    if np.any(R <= 0):
        raise ValueError(f"R values must be positive, got {R.tolist()}")
    if np.unique(R).size != R.size:
        raise ValueError(f"R values must be distinct, got {R.tolist()}")

    design = np.column_stack([np.log10(R), np.ones_like(R)])
    coef, _, rank, _ = np.linalg.lstsq(design, slope, rcond=None)
    if rank < 2:
        raise ValueError("Slope fit design matrix is rank deficient")
    a, b = float(coef[0]), float(coef[1])
    return SlopeFit(a=a, b=b, residuals=slope - design @ coef)


@dataclass
class ScalingStudy:
    """
    Result of ``scaling_study``.

    Attributes
    ----------
    table : pl.DataFrame
        One row per size: measured and predicted scaling constants, tau
        estimates and extreme slopes.
    series : pl.DataFrame
        Long table ``(R, t_prime, avg_x)`` of ``<x>`` on the rescaled axis.
    fit : SlopeFit or None
        Slope-vs-log10 R fit when at least three sizes succeeded.
    """

    table: pl.DataFrame
    series: pl.DataFrame
    fit: SlopeFit | None = None

    def scaling_constants(self) -> dict[float, float]:
        return dict(zip(self.table["R"].to_list(), self.table["s_measured"].to_list(), strict=True))


def scaling_study(
    base: ModelParams,
    R_list: Sequence[float],
    spec: RunSpec | None = None,
    mu_coefficient: float = MU_COEFFICIENT,
    n_jobs: int = 1,
) -> ScalingStudy:
    """
    Run several system sizes and compare their collapses.

    Each size uses ``mu = mu_coefficient / R``. The smallest R is the
    reference: its first deep ``<x>`` extremum fixes tau, every other size is
    rescaled onto it, and the measured scaling constant is compared with the
    logarithmic law.

    Parameters
    ----------
    base : ModelParams
        Supplies lambda, delta and gamma; R and mu are set per size.
    R_list : Sequence[float]
        System sizes, at least two distinct values.
    spec : RunSpec, optional
        Shared run settings; ``n_max`` should be left unset so each size gets
        ``ceil(4 R)``.
    mu_coefficient : float
        Product ``mu R`` held fixed across sizes.
    n_jobs : int
        joblib workers, one job per size.

    Returns
    -------
    ScalingStudy
        Table, rescaled series and optional slope fit.

    Raises
    ------
    ValueError
        On fewer than two sizes or when the reference run has no deep extremum.
    """
    sizes = np.unique(np.asarray(R_list, dtype=float))
    if sizes.size < 2:
        raise ValueError(f"Scaling study needs at least two distinct sizes, got {list(R_list)}")
    spec = spec or RunSpec()
    if spec.n_max is not None:
        logger.warning(f"Fixed n_max={spec.n_max} used for every size in the scaling study")

    params = [base.with_size(R, mu=mu_coefficient / R) for R in sizes]
    logger.info(f"Scaling study over R={sizes.tolist()}, mu*R={mu_coefficient:g}")
    runs = Parallel(n_jobs=n_jobs)(delayed(run_point)(p, spec) for p in params)

    series = [TimeSeries.from_frame(table, "avg_x") for _, table in runs]
    R_ref = float(sizes[0])
    tau, _ = first_deep_extremum(series[0])
    law = ScalingLaw.from_params(params[0], tau)
    logger.info(f"Reference R={R_ref:g}: tau={tau:.6g}, |Lambda|={law.lambda_abs:.6g}, A={law.coefficient:.6g}")

    rows = []
    frames = []
    for R, (report, _), xs in zip(sizes, runs, series, strict=True):
        if R == R_ref:
            s, rescaled = 1.0, xs
        else:
            s, rescaled = rescale_time(series[0], xs)
        s_pred = scaling_constant(law, R_ref, R)
        tau_back = tau_from_scaling(s, R_ref, R, law.lambda_abs) if R > R_ref and s > 1.0 else math.nan
        rows.append(
            {
                "R": float(R),
                "mu": mu_coefficient / R,
                "t_min": s * tau,
                "s_measured": s,
                "s_predicted": s_pred,
                "tau_backsolved": tau_back,
                "extreme_slope": report.extreme_slope,
                "rescaled_slope": s * report.extreme_slope,
            }
        )
        frames.append(
            pl.DataFrame(
                {
                    "R": np.full(len(rescaled), float(R)),
                    "t_prime": rescaled.times,
                    "avg_x": rescaled.values,
                }
            )
        )
        logger.info(f"R={R:g}: s={s:.6g} (law {s_pred:.6g}), slope={report.extreme_slope:.6g}")

    table = pl.DataFrame(rows)
    v0 = abs(float(table["rescaled_slope"][0]))
    if math.isfinite(v0) and v0 > 0:
        table = table.with_columns(
            pl.Series("slope_predicted", [slope_prediction(law, v0, R, R_ref) for R in sizes])
        )
    else:
        table = table.with_columns(pl.lit(math.nan).alias("slope_predicted"))

    fit = None
    finite = [(r["R"], r["rescaled_slope"]) for r in rows if math.isfinite(r["rescaled_slope"])]
    if len(finite) >= 3:
        fit = fit_slope_vs_logR(finite)
        logger.info(f"Slope fit: a={fit.a:.6g}, b={fit.b:.6g}")

    return ScalingStudy(table=table, series=pl.concat(frames), fit=fit)
