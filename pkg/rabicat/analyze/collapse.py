"""
Collapse detection on observable time series.

The cat state departs from the initial packet, splits around the unstable
origin, and its two components merge again when the survival overlap
recurs. After the merge a nonzero parity-breaking term drives ``<x>`` into
one of the two wells; this module locates that event and measures it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.signal import find_peaks

from ..model.effective import well_period
from ..model.rabi import ModelParams
from ..observables.series import TimeSeries
from ..utils.logging_config import get_logger

logger = get_logger(__name__)

DEPARTURE_LEVEL = 0.5
MERGE_PROMINENCE = 0.25
EXIT_MARGIN = 0.05
DEEP_EXTREMUM_FRACTION = 0.5


@dataclass(frozen=True)
class CollapseReport:
    """
    Summary of the first collapse of a run.

    Attributes
    ----------
    t_merge : float
        Time of the first prominent overlap maximum after departure.
    t_min : float
        Time of the largest ``|<x>|`` in the window after the merge.
    depth : float
        Signed ``<x>`` at ``t_min``.
    extreme_slope : float
        Signed derivative of largest magnitude between merge and ``t_min``.
    exit_channel : str
        ``left``, ``right`` or ``none``.
    t_departure : float
        First time the overlap drops below 1/2.
    p_left : float
        Left-well probability at ``t_min``.
    """

    t_merge: float
    t_min: float
    depth: float
    extreme_slope: float
    exit_channel: str
    t_departure: float = math.nan
    p_left: float = math.nan

    @classmethod
    def none(cls, t_departure: float = math.nan) -> CollapseReport:
        """Report for a run without a detectable merge."""
        return cls(math.nan, math.nan, math.nan, math.nan, "none", t_departure)

    @property
    def found(self) -> bool:
        return math.isfinite(self.t_merge)

    def to_dict(self) -> dict:
        return asdict(self)


def find_subsample_peak(values: np.ndarray, index: int | None = None) -> float:
    """
    Find sub-sample peak location using parabolic interpolation.

    Uses a 3-point parabolic fit around the maximum (or around ``index``)
    to refine the peak position between samples.

    Parameters
    ----------
    values : np.ndarray
        1D sampled curve
    index : int, optional
        Sample to refine around; the global maximum by default.

    Returns
    -------
    float
        Sub-sample peak index

    Notes
    -----
    - Fits parabola through 3 points: [peak-1, peak, peak+1]
    - Returns integer index if peak is at array boundary
    - Numerical stability: checks for zero denominator

    Examples
    --------
    >>> x = np.arange(100)
    >>> curve = 1.0 - 0.01 * (x - 50.3) ** 2
    >>> round(find_subsample_peak(curve), 6)
    50.3
    """
    values = np.asarray(values, dtype=float)
    peak = int(np.argmax(values)) if index is None else int(index)

    if peak == 0 or peak == len(values) - 1:
        return float(peak)

    y1, y2, y3 = values[peak - 1], values[peak], values[peak + 1]
    denominator = 2.0 * (y1 - 2.0 * y2 + y3)
    if abs(denominator) < 1e-14:
        return float(peak)

    delta = (y1 - y3) / denominator
    # Stay inside the bracketing samples
    delta = min(0.5, max(-0.5, delta))
    return peak + delta


def _index_to_time(times: np.ndarray, fractional_index: float) -> float:
    return float(np.interp(fractional_index, np.arange(times.size), times))


def _check_same_grid(*series: TimeSeries) -> None:
    ref = series[0]
    for s in series[1:]:
        if len(s) != len(ref) or not np.allclose(s.times, ref.times, rtol=0, atol=1e-9):
            raise ValueError(f"Series '{s.label}' and '{ref.label}' do not share a time grid")


def detect_collapse(
    xs: TimeSeries,
    overlap: TimeSeries,
    p_left: TimeSeries,
    window: float | None = None,
    margin: float = EXIT_MARGIN,
    params: ModelParams | None = None,
) -> CollapseReport:
    """
    Locate the first merge and the collapse of ``<x>`` that follows it.

    Parameters
    ----------
    xs : TimeSeries
        ``<x>(t)``.
    overlap : TimeSeries
        Survival overlap ``|<psi0|psi(t)>|^2``.
    p_left : TimeSeries
        Left-well probability.
    window : float, optional
        Length of the search window after the merge; one small-oscillation
        well period of ``params`` by default.
    margin : float
        Exit-channel margin on the left-well probability around 1/2.
    params : ModelParams, optional
        Model whose well period sets the default window.

    Returns
    -------
    CollapseReport
        Report; ``exit_channel == "none"`` and NaN times when no merge exists.

    Raises
    ------
    ValueError
        If the series do not share a time grid, or if neither ``window`` nor
        ``params`` is given.
    """
    _check_same_grid(xs, overlap, p_left)
    if window is None:
        if params is None:
            raise ValueError("Collapse window undefined: pass window or the model params")
        window = well_period(params)
    if not window > 0:
        raise ValueError(f"Collapse window must be positive, got {window}")
    t = xs.times
    ov = overlap.values

    below = np.flatnonzero(ov < DEPARTURE_LEVEL)
    if below.size == 0:
        logger.debug("Overlap never drops below 1/2; no departure")
        return CollapseReport.none()
    i_dep = int(below[0])
    t_dep = float(t[i_dep])

    post = ov[i_dep:]
    span = float(post.max() - post.min())
    peaks, _ = find_peaks(post, prominence=MERGE_PROMINENCE * span) if span > 0 else ([], {})
    if len(peaks):
        i_merge = i_dep + int(peaks[0])
    else:
        i_merge = i_dep + int(np.argmax(post))
        if i_merge == ov.size - 1 or i_merge == i_dep:
            logger.debug("No overlap recurrence inside the run")
            return CollapseReport.none(t_dep)
    t_merge = _index_to_time(t, find_subsample_peak(ov, i_merge))

    in_window = np.flatnonzero((t > t[i_merge]) & (t <= t_merge + window))
    if in_window.size == 0:
        return CollapseReport.none(t_dep)

    x = xs.values
    i_min = int(in_window[np.argmax(np.abs(x[in_window]))])
    t_min = _index_to_time(t, find_subsample_peak(np.abs(x), i_min))
    depth = float(x[i_min])

    slope = np.gradient(x, t)
    segment = slope[i_merge : i_min + 1]
    extreme_slope = float(segment[np.argmax(np.abs(segment))])

    weight = float(p_left.values[i_min])
    if weight > 0.5 + margin:
        channel = "left"
    elif weight < 0.5 - margin:
        channel = "right"
    else:
        channel = "none"

    report = CollapseReport(
        t_merge=t_merge,
        t_min=t_min,
        depth=depth,
        extreme_slope=extreme_slope,
        exit_channel=channel,
        t_departure=t_dep,
        p_left=weight,
    )
    logger.debug(f"Collapse report: {report}")
    return report


def first_deep_extremum(
    xs: TimeSeries, fraction: float = DEEP_EXTREMUM_FRACTION
) -> tuple[float, int]:
    """
    First local extremum of ``|<x>|`` reaching ``fraction`` of its maximum.

    Returns
    -------
    Tuple[float, int]
        Sub-sample time and sample index.

    Raises
    ------
    ValueError
        If the series has no such extremum.
    """
    magnitude = np.abs(xs.values)
    top = float(magnitude.max()) if len(xs) else 0.0
    if top <= 0.0:
        raise ValueError(f"Series '{xs.label}' has no extremum (identically zero)")
    peaks, _ = find_peaks(magnitude, height=fraction * top)
    if len(peaks) == 0:
        raise ValueError(f"Series '{xs.label}' has no interior extremum above {fraction} of max")
    index = int(peaks[0])
    return _index_to_time(xs.times, find_subsample_peak(magnitude, index)), index


def rescale_time(xs_ref: TimeSeries, xs: TimeSeries) -> tuple[float, TimeSeries]:
    """
    Dilate the time axis of ``xs`` so its first deep extremum meets that of ``xs_ref``.

    Parameters
    ----------
    xs_ref : TimeSeries
        ``<x>(t)`` at the reference size.
    xs : TimeSeries
        ``<x>(t)`` at another size.

    Returns
    -------
    Tuple[float, TimeSeries]
        Scaling constant ``s = t_min / t_min_ref`` and ``<x>(s t')`` sampled on
        the reference grid by linear interpolation (truncated where ``s t'``
        leaves the run).

    Raises
    ------
    ValueError
        If either series lacks a deep extremum.
    """
    t_ref, _ = first_deep_extremum(xs_ref)
    t_own, _ = first_deep_extremum(xs)
    s = t_own / t_ref

    grid = xs_ref.times[s * xs_ref.times <= xs.times[-1] + 1e-12]
    values = np.interp(s * grid, xs.times, xs.values)
    return s, TimeSeries(grid, values, label=f"{xs.label}_rescaled")
