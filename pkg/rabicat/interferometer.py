"""
Optical loop analog of the dynamical parity violation.

A photon enters a 50/50 beam splitter, picks up a small extra phase in one
arm on each of ``n`` loop cycles and leaves through a second splitter. The
accumulated phase ``n * dphi`` decides the exit asymmetry.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import polars as pl

from .utils.logging_config import get_logger

logger = get_logger(__name__)

# Symmetric 50/50 splitter, factor i on reflection
BEAM_SPLITTER = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / math.sqrt(2.0)
# Quarter-wave offset of the half-reflecting mirror
MIRROR_OFFSET = np.diag([1.0, -1.0j])


@dataclass(frozen=True)
class InterferometerSpec:
    """
    Loop interferometer setting.

    Attributes
    ----------
    n_cycles : int
        Number of loop cycles (>= 0).
    dphi : float
        Phase shift per cycle in radians.
    """

    n_cycles: int
    dphi: float

    def __post_init__(self) -> None:
        if int(self.n_cycles) != self.n_cycles or self.n_cycles < 0:
            raise ValueError(f"n_cycles must be a non-negative integer, got {self.n_cycles}")
        if not math.isfinite(self.dphi):
            raise ValueError(f"dphi must be finite, got {self.dphi}")

    @property
    def total_phase(self) -> float:
        return self.n_cycles * self.dphi


def exit_amplitudes(spec: InterferometerSpec) -> tuple[float, float]:
    """
    Closed-form exit amplitudes ``(cos a, sin a)`` with ``a = (n dphi + pi/2) / 2``.

    Examples
    --------
    >>> a_left, a_right = exit_amplitudes(InterferometerSpec(0, 0.1))
    >>> round(a_left**2, 12), round(a_right**2, 12)
    (0.5, 0.5)
    """
    alpha = 0.5 * (spec.total_phase + 0.5 * math.pi)
    return math.cos(alpha), math.sin(alpha)


def exit_amplitudes_oracle(spec: InterferometerSpec) -> tuple[complex, complex]:
    """
    Exit amplitudes from the product of 2x2 transfer matrices.

    Only the moduli are fixed by the closed form; the phases depend on the
    splitter convention.

    Returns
    -------
    Tuple[complex, complex]
        ``(left, right)`` complex amplitudes.
    """
    cycle = np.diag([np.exp(1j * spec.dphi), 1.0])
    state = MIRROR_OFFSET @ BEAM_SPLITTER @ np.array([1.0, 0.0], dtype=complex)
    state = np.linalg.matrix_power(cycle, int(spec.n_cycles)) @ state
    out = BEAM_SPLITTER @ state
    return complex(out[1]), complex(out[0])


def exit_probabilities(spec: InterferometerSpec) -> tuple[float, float]:
    a_left, a_right = exit_amplitudes(spec)
    return a_left**2, a_right**2


def scan_table(n_cycles: int, phases: Sequence[float] | np.ndarray) -> pl.DataFrame:
    """
    Exit probabilities over a range of per-cycle phase shifts.

    Parameters
    ----------
    n_cycles : int
        Number of loop cycles.
    phases : array-like
        Per-cycle phase shifts.

    Returns
    -------
    pl.DataFrame
        Columns ``n_dphi``, ``P_left``, ``P_right``.
    """
    specs = [InterferometerSpec(n_cycles, float(d)) for d in np.asarray(phases, dtype=float)]
    probs = np.array([exit_probabilities(s) for s in specs]).reshape(-1, 2)
    logger.debug(f"Interferometer scan: {len(specs)} phases, n={n_cycles}")
    return pl.DataFrame(
        {
            "n_dphi": np.array([s.total_phase for s in specs], dtype=float),
            "P_left": probs[:, 0],
            "P_right": probs[:, 1],
        }
    )
