"""
Collapse detection, parameter sweeps and size scaling.
"""

from .collapse import (
    CollapseReport,
    detect_collapse,
    find_subsample_peak,
    first_deep_extremum,
    rescale_time,
)
from .scaling import ScalingStudy, SlopeFit, fit_slope_vs_logR, scaling_study
from .sweeps import (
    RunSpec,
    SweepResult,
    count_channel_alternations,
    log_mu_grid,
    run_point,
    sweep_gamma,
    sweep_mu,
)

__all__ = [
    "CollapseReport",
    "RunSpec",
    "ScalingStudy",
    "SlopeFit",
    "SweepResult",
    "count_channel_alternations",
    "detect_collapse",
    "find_subsample_peak",
    "first_deep_extremum",
    "fit_slope_vs_logR",
    "log_mu_grid",
    "rescale_time",
    "run_point",
    "scaling_study",
    "sweep_gamma",
    "sweep_mu",
]
