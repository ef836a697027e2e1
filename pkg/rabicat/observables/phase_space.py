"""
Phase-space representations of the reduced oscillator state.

Coordinates follow the scaled convention ``x = X / sqrt(R)``,
``p = P / sqrt(R)`` where ``X = (b + b^dag)/sqrt(2)`` has vacuum variance 1/2.
Distributions are returned as densities in the scaled variables, i.e. with
the Jacobians ``sqrt(R)`` (coordinate) and ``R`` (Wigner) applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import polars as pl
from joblib import Parallel, delayed
from scipy.integrate import trapezoid
from scipy.special import gammaln

from ..errors import RecurrenceOverflowError
from ..model.rabi import ModelParams
from ..utils.logging_config import get_logger
from .reduced import OscillatorDensityMatrix

logger = get_logger(__name__)

# Magnitude at which recurrence values are folded into the log scale
RESCALE_THRESHOLD = 1e100
RESCALE_EVERY = 4
NORMALIZATION_TOL = 1e-3
# Grid points evaluated per Wigner work item
WIGNER_CHUNK = 4096


def hermite_functions(X: np.ndarray, n_max: int) -> np.ndarray:
    """
    Normalized oscillator eigenfunctions ``psi_n(X)`` for ``n = 0..n_max``.

    Uses the upward recurrence

        psi_n = sqrt(2/n) X psi_{n-1} - sqrt((n-1)/n) psi_{n-2}

    on values carried with a per-point logarithmic scale, so the Gaussian
    prefactor never underflows before the polynomial growth is applied.

    Parameters
    ----------
    X : np.ndarray
        Standard (unscaled) coordinates.
    n_max : int
        Highest order.

    Returns
    -------
    np.ndarray
        Array of shape ``(n_max + 1, len(X))``.

    Raises
    ------
    RecurrenceOverflowError
        If a non-finite value appears.

    Examples
    --------
    >>> psi = hermite_functions(np.array([0.0]), 2)
    >>> round(psi[0, 0] ** 2, 6)  # 1/sqrt(pi)
    0.56419
    """
    X = np.atleast_1d(np.asarray(X, dtype=float))
    out = np.zeros((n_max + 1, X.size))
    log_scale = -0.5 * X**2
    prev = np.zeros_like(X)
    curr = np.full_like(X, np.pi**-0.25)
    out[0] = curr * np.exp(log_scale)

    for n in range(1, n_max + 1):
        nxt = math.sqrt(2.0 / n) * X * curr - math.sqrt((n - 1) / n) * prev
        prev, curr = curr, nxt
        if n % RESCALE_EVERY == 0:
            big = np.abs(curr) > RESCALE_THRESHOLD
            if np.any(big):
                prev[big] /= RESCALE_THRESHOLD
                curr[big] /= RESCALE_THRESHOLD
                log_scale[big] += math.log(RESCALE_THRESHOLD)
        out[n] = curr * np.exp(log_scale)

    if not np.all(np.isfinite(out)):
        raise RecurrenceOverflowError(
            f"Hermite recurrence overflow for |X| up to {np.max(np.abs(X)):.3g}, n_max={n_max}"
        )
    return out


@dataclass(frozen=True)
class CoordinateDistribution:
    """
    Probability density of the scaled coordinate.

    Attributes
    ----------
    x : np.ndarray
        Scaled coordinate grid.
    density : np.ndarray
        ``P(x)`` on the grid.
    """

    x: np.ndarray
    density: np.ndarray

    def integral(self) -> float:
        return float(trapezoid(self.density, self.x))

    def left_weight(self) -> float:
        """Probability of ``x < 0``, by trapezoid on the negative part of the grid."""
        mask = self.x <= 0
        return float(trapezoid(self.density[mask], self.x[mask]))

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame({"x": self.x, "P": self.density})


def coordinate_distribution(
    rho: OscillatorDensityMatrix, x_grid: np.ndarray, params: ModelParams
) -> CoordinateDistribution:
    """
    Coordinate probability density ``P(x) = <x|rho_osc|x>`` in scaled units.

    Parameters
    ----------
    rho : OscillatorDensityMatrix
        Reduced oscillator state.
    x_grid : np.ndarray
        Scaled coordinates.
    params : ModelParams
        Supplies R.

    Returns
    -------
    CoordinateDistribution
        ``sqrt(R) sum rho_nn' psi_n(X) psi_n'(X)`` with ``X = sqrt(R) x``.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    sqrt_r = math.sqrt(params.R)
    psi = hermite_functions(sqrt_r * x_grid, rho.n_max)
    density = np.einsum("nk,nm,mk->k", psi, rho.rho_osc, psi, optimize=True).real
    return CoordinateDistribution(x=x_grid, density=sqrt_r * density)


def left_well_operator(n_max: int, spacing: float = 0.01) -> np.ndarray:
    """
    Fock-basis matrix of the half-line projector ``theta(-X)``.

    ``M_nm = int_{-L}^{0} psi_n(X) psi_m(X) dX`` with ``L`` beyond the
    classical turning point of ``n_max``; trapezoid weights on a uniform grid.
    The left-well probability of a state is ``Tr(rho_osc M)``; since the scaled
    coordinate only rescales X, the same matrix serves every R.
    """
    L = math.sqrt(2.0 * n_max + 1.0) + 8.0
    n_points = int(math.ceil(L / spacing)) + 1
    X = np.linspace(-L, 0.0, n_points)
    weights = np.full(n_points, X[1] - X[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5

    M = np.zeros((n_max + 1, n_max + 1))
    for start in range(0, n_points, 8192):
        sl = slice(start, start + 8192)
        psi = hermite_functions(X[sl], n_max)
        M += (psi * weights[sl]) @ psi.T
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class PhaseGridSpec:
    """
    Rectangular phase-space grid in scaled coordinates.

    Defaults cover ``[-2, 2]^2`` with 256 points per axis.
    """

    x_min: float = -2.0
    x_max: float = 2.0
    p_min: float = -2.0
    p_max: float = 2.0
    n_x: int = 256
    n_p: int = 256

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min or not self.p_max > self.p_min:
            raise ValueError(f"Grid bounds must be increasing, got {self}")
        if self.n_x < 2 or self.n_p < 2:
            raise ValueError(f"Grid needs at least 2 points per axis, got {self.n_x}x{self.n_p}")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.x_min, self.x_max, self.n_x),
            np.linspace(self.p_min, self.p_max, self.n_p),
        )


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """
    Sampled Wigner distribution.

    Attributes
    ----------
    x_axis, p_axis : np.ndarray
        Uniform axes.
    w : np.ndarray
        ``W[i, j] = W(x_axis[i], p_axis[j])``.
    normalization : float
        Trapezoid integral of ``w`` over the grid.
    """

    x_axis: np.ndarray
    p_axis: np.ndarray
    w: np.ndarray
    normalization: float = field(default=float("nan"))

    def x_marginal(self) -> np.ndarray:
        """``int W dp`` for every x on the grid."""
        return trapezoid(self.w, self.p_axis, axis=1)

    def first_moment_x(self) -> float:
        return float(trapezoid(self.x_axis * self.x_marginal(), self.x_axis))

    def first_moment_p(self) -> float:
        p_marginal = trapezoid(self.w, self.x_axis, axis=0)
        return float(trapezoid(self.p_axis * p_marginal, self.p_axis))

    def min_value(self) -> float:
        return float(self.w.min())

    def to_frame(self) -> pl.DataFrame:
        """Rows ``(x, p, W)`` in x-major order."""
        xx, pp = np.meshgrid(self.x_axis, self.p_axis, indexing="ij")
        return pl.DataFrame({"x": xx.ravel(), "p": pp.ravel(), "W": self.w.ravel()})


def _wigner_chunk(rho: np.ndarray, X: np.ndarray, P: np.ndarray) -> np.ndarray:
    """
    Standard-coordinate Wigner function at a set of points.

    ``W = (1/pi) sum_k (2 - delta_k0) Re[e^{-ik theta} sum_n rho[n+k, n] (-1)^n l_n^k(y)]``
    with ``y = 2 (X^2 + P^2)`` and normalized Laguerre functions ``l_n^k``.
    """
    N = rho.shape[0]
    r2 = X**2 + P**2
    y = 2.0 * r2
    theta = np.arctan2(P, X)
    with np.errstate(divide="ignore"):
        log_y = np.log(y)
    W = np.zeros_like(X)

    for k in range(N):
        coeffs = np.diagonal(rho, offset=-k) * (-1.0) ** np.arange(N - k)
        if not np.any(coeffs):
            continue

        # l_0^k = y^{k/2} e^{-y/2} / sqrt(k!), kept as scaled value times exp(log_scale)
        if k == 0:
            log_scale = -0.5 * y
        else:
            log_scale = 0.5 * k * log_y - 0.5 * y - 0.5 * gammaln(k + 1.0)
        zero = ~np.isfinite(log_scale)
        log_scale = np.where(zero, 0.0, log_scale)
        prev = np.zeros_like(X)
        curr = np.where(zero, 0.0, 1.0)
        acc = coeffs[0] * curr

        for n in range(0, N - k - 1):
            if n == 0:
                nxt = (1.0 + k - y) / math.sqrt(1.0 + k) * curr
            else:
                nxt = (
                    (2.0 * n + 1.0 + k - y) * curr - math.sqrt(n * (n + k)) * prev
                ) / math.sqrt((n + 1.0) * (n + 1.0 + k))
            prev, curr = curr, nxt
            acc = acc + coeffs[n + 1] * curr
            if n % RESCALE_EVERY == 0:
                big = np.abs(curr) > RESCALE_THRESHOLD
                if np.any(big):
                    prev[big] /= RESCALE_THRESHOLD
                    curr[big] /= RESCALE_THRESHOLD
                    acc[big] /= RESCALE_THRESHOLD
                    log_scale[big] += math.log(RESCALE_THRESHOLD)

        total = acc * np.exp(log_scale)
        weight = 1.0 if k == 0 else 2.0
        W += weight * (np.exp(-1j * k * theta) * total).real

    if not np.all(np.isfinite(W)):
        raise RecurrenceOverflowError("Laguerre recurrence produced non-finite Wigner values")
    return W / np.pi


def wigner(
    rho: OscillatorDensityMatrix,
    grid: PhaseGridSpec,
    params: ModelParams,
    n_jobs: int = 1,
    strict: bool = False,
) -> PhaseSpaceGrid:
    """
    Wigner distribution of the reduced oscillator state in scaled coordinates.

    The Fock-basis closed form is evaluated at ``(X, P) = sqrt(R) (x, p)`` and
    multiplied by the Jacobian R.

    Parameters
    ----------
    rho : OscillatorDensityMatrix
        Reduced oscillator state.
    grid : PhaseGridSpec
        Scaled-coordinate grid.
    params : ModelParams
        Supplies R.
    n_jobs : int
        joblib workers for grid chunks.
    strict : bool
        Raise instead of warning when the grid misses part of the state.

    Returns
    -------
    PhaseSpaceGrid
        Sampled distribution with its grid normalization.

    Raises
    ------
    ValueError
        In strict mode, if the grid integral deviates from 1 by more than 1e-3.

    Examples
    --------
    >>> vac = reduce_oscillator(initial_state(FockConfig(n_max=4)))
    >>> g = wigner(vac, PhaseGridSpec(n_x=65, n_p=65), ModelParams(100.0, 0.75, 0.5))
    >>> round(g.w[32, 32], 3)
    31.831
    """
    x_axis, p_axis = grid.axes()
    sqrt_r = math.sqrt(params.R)
    xx, pp = np.meshgrid(x_axis, p_axis, indexing="ij")
    X = sqrt_r * xx.ravel()
    P = sqrt_r * pp.ravel()

    chunks = [slice(i, i + WIGNER_CHUNK) for i in range(0, X.size, WIGNER_CHUNK)]
    if n_jobs == 1 or len(chunks) == 1:
        parts = [_wigner_chunk(rho.rho_osc, X[sl], P[sl]) for sl in chunks]
    else:
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_wigner_chunk)(rho.rho_osc, X[sl], P[sl]) for sl in chunks
        )
    w = params.R * np.concatenate(parts).reshape(xx.shape)

    normalization = float(trapezoid(trapezoid(w, p_axis, axis=1), x_axis))
    if abs(normalization - 1.0) > NORMALIZATION_TOL:
        message = (
            f"Wigner grid integral {normalization:.6f} deviates from 1 by more than "
            f"{NORMALIZATION_TOL}; enlarge the grid"
        )
        if strict:
            raise ValueError(message)
        logger.warning(message)

    return PhaseSpaceGrid(x_axis=x_axis, p_axis=p_axis, w=w, normalization=normalization)
