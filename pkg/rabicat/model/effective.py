"""
Classical analytics of the large-R limit.

The oscillator sees the qubit adiabatically aligned (branch ``up``) or
anti-aligned (branch ``down``) with the field vector, giving the energy
surfaces

    h_eff(x, p) = (x^2 + p^2)/2 + sqrt(2) mu x -+ sqrt(f(x, p))
    f(x, p)     = 1/4 + 2 (lam^2 + mu^2) x^2 + 2 (lam delta)^2 p^2 + sqrt(2) mu x

This module classifies the origin of phase space, linearizes Hamilton's
equations there and provides the logarithmic scaling laws that follow from
an unstable (saddle) origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import polars as pl
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from ..errors import DomainError
from ..utils.logging_config import get_logger
from .rabi import ModelParams

logger = get_logger(__name__)

Branch = Literal["up", "down"]

# Eigenvalue-squared magnitude below which the origin counts as marginal
MARGINAL_TOL = 1e-12


def _branch_sign(branch: Branch) -> float:
    if branch == "up":
        return -1.0
    if branch == "down":
        return 1.0
    raise ValueError(f"branch must be 'up' or 'down', got {branch!r}")


def _radicand(x, p, params: ModelParams):
    a = 2.0 * (params.lam**2 + params.mu**2)
    c = 2.0 * (params.lam * params.delta) ** 2
    f = 0.25 + a * np.square(x) + c * np.square(p) + math.sqrt(2.0) * params.mu * x
    if np.any(np.asarray(f) < 0):
        raise DomainError(
            f"Negative radicand in effective Hamiltonian (min {np.min(f):.3e}) "
            f"for mu={params.mu}"
        )
    return f


def h_eff(x, p, params: ModelParams, branch: Branch = "up"):
    """
    Effective classical energy per unit R.

    Parameters
    ----------
    x, p : float or np.ndarray
        Scaled phase-space coordinates; arrays broadcast.
    params : ModelParams
        Model parameters.
    branch : {"up", "down"}
        Qubit alignment. ``up`` takes the minus sign in front of the root.

    Returns
    -------
    float or np.ndarray
        Energy surface value(s).

    Raises
    ------
    DomainError
        If the radicand is negative anywhere.

    Examples
    --------
    >>> h_eff(0.0, 0.0, ModelParams(100.0, 0.75, 0.5))
    -0.5
    """
    sign = _branch_sign(branch)
    f = _radicand(x, p, params)
    value = 0.5 * (np.square(x) + np.square(p)) + math.sqrt(2.0) * params.mu * x
    value = value + sign * np.sqrt(f)
    if np.ndim(value) == 0:
        return float(value)
    return value


def gradient(x: float, p: float, params: ModelParams, branch: Branch = "up") -> np.ndarray:
    """Analytic gradient ``(dh/dx, dh/dp)`` of ``h_eff``."""
    sign = _branch_sign(branch)
    a = 2.0 * (params.lam**2 + params.mu**2)
    c = 2.0 * (params.lam * params.delta) ** 2
    f = float(_radicand(x, p, params))
    root = math.sqrt(f)
    f_x = 2.0 * a * x + math.sqrt(2.0) * params.mu
    f_p = 2.0 * c * p
    h_x = x + math.sqrt(2.0) * params.mu + sign * f_x / (2.0 * root)
    h_p = p + sign * f_p / (2.0 * root)
    return np.array([h_x, h_p])


def hessian(x: float, p: float, params: ModelParams, branch: Branch = "up") -> np.ndarray:
    """
    Analytic Hessian of ``h_eff``.

    Returns
    -------
    np.ndarray
        Symmetric matrix ``[[h_xx, h_xp], [h_xp, h_pp]]``.
    """
    sign = _branch_sign(branch)
    a = 2.0 * (params.lam**2 + params.mu**2)
    c = 2.0 * (params.lam * params.delta) ** 2
    f = float(_radicand(x, p, params))
    if f == 0.0:
        raise DomainError("Hessian undefined where the field vector vanishes")
    root = math.sqrt(f)
    f32 = f * root
    f_x = 2.0 * a * x + math.sqrt(2.0) * params.mu
    f_p = 2.0 * c * p

    h_xx = 1.0 + sign * (a / root - f_x**2 / (4.0 * f32))
    h_pp = 1.0 + sign * (c / root - f_p**2 / (4.0 * f32))
    h_xp = -sign * f_x * f_p / (4.0 * f32)
    return np.array([[h_xx, h_xp], [h_xp, h_pp]])


def linearized_matrix(
    params: ModelParams, x: float = 0.0, p: float = 0.0, branch: Branch = "up"
) -> np.ndarray:
    """
    Matrix of Hamilton's equations linearized around (x, p).

    ``d/dt (dx, dp) = M (dx, dp)`` with

        M = [[ h_px,  h_pp],
             [-h_xx, -h_xp]]

    The trace vanishes identically, so the eigenvalues come as a +- pair.

    Parameters
    ----------
    params : ModelParams
        Model parameters.
    x, p : float
        Linearization point, the origin by default.
    branch : {"up", "down"}
        Energy surface.

    Returns
    -------
    np.ndarray
        Real 2x2 matrix.
    """
    h = hessian(x, p, params, branch)
    return np.array([[h[0, 1], h[1, 1]], [-h[0, 0], -h[1, 0]]])


def stability_eigenvalues(params: ModelParams) -> tuple[complex, complex]:
    """
    Closed-form origin eigenvalues ``+-sqrt((4 lam^2 - 1)(1 - 4 lam^2 delta^2))``.

    Real for a saddle, imaginary for an extremum.
    """
    lam2 = params.lam**2
    root = np.sqrt(complex((4.0 * lam2 - 1.0) * (1.0 - 4.0 * lam2 * params.delta**2)))
    return complex(root), complex(-root)


@dataclass(frozen=True)
class StationaryPointReport:
    """
    Classification of the phase-space origin on the ``up`` surface.

    Attributes
    ----------
    kind : str
        ``global_minimum``, ``saddle`` or ``local_maximum``.
    lambda_ranges : dict
        Thresholds used: minimum up to ``1/2``, saddle up to ``1/(2|delta|)``.
    eigenvalues : Tuple[complex, complex]
        Eigenvalues of the linearized matrix, ordered (+, -).
    stable : bool
        True when the eigenvalues are purely imaginary.
    hessian : np.ndarray
        Hessian of ``h_eff`` at the origin.
    gradient : np.ndarray
        Gradient at the origin; its norm measures how far the true stationary
        point moved away for nonzero mu.
    """

    kind: str
    lambda_ranges: dict[str, float]
    eigenvalues: tuple[complex, complex]
    stable: bool
    hessian: np.ndarray = field(repr=False)
    gradient: np.ndarray = field(repr=False)

    @property
    def lambda_abs(self) -> float:
        """Modulus of the instability exponent, zero unless saddle."""
        return abs(self.eigenvalues[0].real)

    @property
    def shift(self) -> float:
        return float(np.linalg.norm(self.gradient))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "stable": self.stable,
            "eigenvalue_re": self.eigenvalues[0].real,
            "eigenvalue_im": abs(self.eigenvalues[0].imag),
            "lambda_abs": self.lambda_abs,
            "h_xx": float(self.hessian[0, 0]),
            "h_pp": float(self.hessian[1, 1]),
            "h_xp": float(self.hessian[0, 1]),
            "gradient_norm": self.shift,
            **{f"threshold_{k}": v for k, v in self.lambda_ranges.items()},
        }


def classify_origin(params: ModelParams) -> StationaryPointReport:
    """
    Classify the origin of the ``up`` energy surface.

    Eigenvalues are computed from the linearized matrix, so nonzero mu is
    handled with the same code path; the closed form of
    ``stability_eigenvalues`` agrees for mu = 0.

    Parameters
    ----------
    params : ModelParams
        Model parameters.

    Returns
    -------
    StationaryPointReport
        Kind, eigenvalues and stability.

    Examples
    --------
    >>> report = classify_origin(ModelParams(100.0, 0.75, 0.5))
    >>> report.kind, round(report.lambda_abs, 5)
    ('saddle', 0.73951)
    """
    h = hessian(0.0, 0.0, params, "up")
    m = linearized_matrix(params)
    # trace(M) = 0, so eigenvalues are +-sqrt(-det M)
    lam_sq = float(m[0, 0] ** 2 + m[0, 1] * m[1, 0])
    if lam_sq > 0:
        root = complex(math.sqrt(lam_sq), 0.0)
    else:
        root = complex(0.0, math.sqrt(-lam_sq))

    h_xx = float(h[0, 0])
    if lam_sq > MARGINAL_TOL:
        kind = "saddle"
    elif lam_sq < -MARGINAL_TOL:
        kind = "global_minimum" if h_xx > 0 else "local_maximum"
    else:
        # Marginal: lam = 1/2 closes the minimum range, lam = 1/(2|delta|) the saddle range
        kind = "global_minimum" if h_xx >= -MARGINAL_TOL else "saddle"

    saddle_max = math.inf if params.delta == 0 else 1.0 / (2.0 * abs(params.delta))
    report = StationaryPointReport(
        kind=kind,
        lambda_ranges={"minimum_max": 0.5, "saddle_max": saddle_max},
        eigenvalues=(root, -root),
        stable=kind != "saddle",
        hessian=h,
        gradient=gradient(0.0, 0.0, params, "up"),
    )
    logger.debug(f"Origin classification: {report.kind}, |Lambda|={report.lambda_abs:.6g}")
    return report


WELL_SCAN_POINTS = 4001


def _axis_minima(params: ModelParams) -> list[tuple[float, float]]:
    """
    Local minima ``(energy, x)`` of the ``up`` surface along ``p = 0``.

    Minima lie on that axis, where ``dh/dp`` vanishes. They are bracketed
    on a coarse scan and refined with a bounded scalar minimizer.
    """
    a = 2.0 * (params.lam**2 + params.mu**2)
    extent = 2.0 * (1.0 + math.sqrt(a) + abs(params.mu))
    xs = np.linspace(-extent, extent, WELL_SCAN_POINTS)
    energy = h_eff(xs, np.zeros_like(xs), params, "up")
    candidates, _ = find_peaks(-energy)

    refined = []
    for i in candidates:
        result = minimize_scalar(
            lambda v: h_eff(v, 0.0, params, "up"),
            bounds=(xs[i - 1], xs[i + 1]),
            method="bounded",
            options={"xatol": 1e-12},
        )
        refined.append((float(result.fun), float(result.x)))
    return refined


def well_minima(params: ModelParams) -> tuple[float, float]:
    """
    Positions ``x`` of the left and right minima of the ``up`` surface.

    Returns
    -------
    Tuple[float, float]
        ``(x_left, x_right)`` with ``x_left < 0 < x_right`` up to the mu shift.

    Raises
    ------
    ValueError
        If the surface has no minimum on one side (single well).
    """
    refined = _axis_minima(params)
    left = [m for m in refined if m[1] < 0]
    right = [m for m in refined if m[1] > 0]
    if not left or not right:
        raise ValueError(
            f"No double well on the up surface for lambda={params.lam}, "
            f"delta={params.delta}, mu={params.mu}"
        )
    return min(left)[1], min(right)[1]


def well_period(params: ModelParams) -> float:
    """
    Small-oscillation period at the well minima, the longest one.

    A strong tilt can remove one well; the remaining minimum then sets the
    period.

    The linearized flow at a minimum has eigenvalues ``+-i w`` with
    ``w^2 = det(hessian)`` (``h_xp`` vanishes on the ``p = 0`` axis).

    Examples
    --------
    >>> round(well_period(ModelParams(100.0, 0.75, 0.5)), 3)
    8.099
    """
    minima = _axis_minima(params)
    if not minima:
        raise ValueError(f"No minimum on the up surface for lambda={params.lam}, mu={params.mu}")
    periods = []
    for _, x0 in minima:
        det = float(np.linalg.det(hessian(x0, 0.0, params, "up")))
        if det <= 0:
            raise ValueError(f"Stationary point x={x0:.6g} is not a minimum (det={det:.3e})")
        periods.append(2.0 * math.pi / math.sqrt(det))
    return max(periods)


def expansion_delay(R: float, R_prime: float, lambda_abs: float) -> float:
    """
    Extra time a packet of width ``1/sqrt(R')`` needs to spread like one of
    width ``1/sqrt(R)`` near an unstable origin: ``ln(R'/R) / (2 |Lambda|)``.

    Raises
    ------
    ValueError
        On nonpositive arguments or ``R' < R``.
    """
    if R <= 0 or R_prime <= 0 or lambda_abs <= 0:
        raise ValueError(
            f"expansion_delay needs positive arguments, got R={R}, "
            f"R_prime={R_prime}, lambda_abs={lambda_abs}"
        )
    if R_prime < R:
        raise ValueError(f"R_prime must be >= R, got R={R}, R_prime={R_prime}")
    return math.log(R_prime / R) / (2.0 * lambda_abs)


@dataclass(frozen=True)
class ScalingLaw:
    """
    Logarithmic time dilation between system sizes.

    Attributes
    ----------
    lambda_abs : float
        Instability exponent |Lambda| of the saddle.
    tau : float
        Time of the first deep ``<x>`` minimum at the reference size.
    """

    lambda_abs: float
    tau: float

    def __post_init__(self) -> None:
        if not self.lambda_abs > 0:
            raise ValueError(f"lambda_abs must be positive, got {self.lambda_abs}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def coefficient(self) -> float:
        """``A = 3 / (2 |Lambda| tau)``."""
        return 3.0 / (2.0 * self.lambda_abs * self.tau)

    @classmethod
    def from_params(cls, params: ModelParams, tau: float) -> ScalingLaw:
        """Law with |Lambda| taken from the origin classification."""
        report = classify_origin(params)
        if report.kind != "saddle":
            raise ValueError(
                f"Scaling law requires an unstable origin, got {report.kind} "
                f"for lambda={params.lam}, delta={params.delta}"
            )
        return cls(lambda_abs=report.lambda_abs, tau=tau)


def scaling_constant(law: ScalingLaw, R: float, R_prime: float) -> float:
    """
    Time scaling ``s = 1 + A ln(R'/R)`` aligning collapse times of two sizes.

    Examples
    --------
    >>> scaling_constant(ScalingLaw(0.7395, 13.0), 100.0, 100.0)
    1.0
    """
    if R <= 0 or R_prime <= 0:
        raise ValueError(f"Sizes must be positive, got R={R}, R_prime={R_prime}")
    return 1.0 + law.coefficient * math.log(R_prime / R)


def slope_prediction(law: ScalingLaw, v0: float, R: float, R_ref: float) -> float:
    """
    Predicted extreme slope of ``<x>`` in rescaled time at size R.

    ``-v0 - v0 A ln(R / R_ref)`` where ``v0 > 0`` is the slope magnitude
    measured at ``R_ref``.
    """
    if v0 <= 0:
        raise ValueError(f"v0 must be positive, got {v0}")
    if R <= 0 or R_ref <= 0:
        raise ValueError(f"Sizes must be positive, got R={R}, R_ref={R_ref}")
    return -v0 - v0 * law.coefficient * math.log(R / R_ref)


def tau_from_scaling(s: float, R: float, R_prime: float, lambda_abs: float) -> float:
    """
    Invert ``scaling_constant`` for the reference minimum time tau.

    Raises
    ------
    ValueError
        If ``s <= 1`` or ``R' <= R``.
    """
    if s <= 1.0 or R_prime <= R or lambda_abs <= 0:
        raise ValueError(
            f"Cannot back-solve tau from s={s}, R={R}, R_prime={R_prime}, "
            f"lambda_abs={lambda_abs}"
        )
    return 3.0 * math.log(R_prime / R) / (2.0 * lambda_abs * (s - 1.0))


def effective_surface(
    params: ModelParams,
    x_axis: np.ndarray,
    p_axis: np.ndarray,
    branch: Branch | None = None,
) -> pl.DataFrame:
    """
    Sample the energy surfaces on a rectangular grid.

    Parameters
    ----------
    params : ModelParams
        Model parameters.
    x_axis, p_axis : np.ndarray
        Grid axes.
    branch : {"up", "down"}, optional
        Single surface to sample; both when omitted.

    Returns
    -------
    pl.DataFrame
        Columns ``x``, ``p`` and ``h_up`` and/or ``h_down``, in x-major order.
    """
    branches: tuple[Branch, ...] = ("up", "down") if branch is None else (branch,)
    for b in branches:
        _branch_sign(b)
    xx, pp = np.meshgrid(np.asarray(x_axis, float), np.asarray(p_axis, float), indexing="ij")
    columns = {"x": xx.ravel(), "p": pp.ravel()}
    for b in branches:
        columns[f"h_{b}"] = np.asarray(h_eff(xx, pp, params, b)).ravel()
    return pl.DataFrame(columns)
