"""Radial distortion polynomial, its exact inverse, and the lookup table.

The lens model maps the field angle theta of an incoming ray to a
"rectified" angle theta_d through a degree-9 odd polynomial. Projection
needs the forward map; unprojection needs the inverse, which is either
solved exactly (bracketed bisection on the monotone map) or read from a
precomputed table with linear interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import DomainError, MonotonicityViolation, OutOfRange

HALF_PI = math.pi / 2.0
DEFAULT_N_GRIDS = 900
EXACT_SOLVER_TOL = 1e-12


@dataclass(frozen=True)
class DistortionCoeffs:
    """Dimensionless polynomial coefficients (k1..k4) of the angle map."""

    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    k4: float = 0.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.k1, self.k2, self.k3, self.k4)


def theta_d_from_theta(theta, coeffs: DistortionCoeffs):
    """Forward angle map: theta_d = theta (1 + k1 t^2 + k2 t^4 + k3 t^6 + k4 t^8).

    Accepts a scalar or array of angles in [0, pi/2].
    """
    arr = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if np.any(arr < 0.0) or np.any(arr > HALF_PI):
        raise DomainError("theta must lie in [0, pi/2]")
    out = _core.distort_angles(np.ascontiguousarray(arr), *coeffs.as_tuple())
    if np.isscalar(theta) or np.ndim(theta) == 0:
        return float(out[0])
    return out


def theta_d_max(coeffs: DistortionCoeffs) -> float:
    """Largest representable distorted angle, attained at theta = pi/2."""
    return theta_d_from_theta(HALF_PI, coeffs)


def theta_from_theta_d_exact(theta_d, coeffs: DistortionCoeffs):
    """Invert the angle map by bisection on [0, pi/2] to 1e-12 rad.

    This is the reference inversion: the unique root exists because the
    forward map is strictly increasing on the bracket. Serves as the
    oracle the lookup table is validated against.
    """
    arr = np.atleast_1d(np.asarray(theta_d, dtype=np.float64))
    hi = theta_d_max(coeffs)
    if np.any(arr < 0.0) or np.any(arr > hi + 1e-12):
        raise OutOfRange(
            f"theta_d outside invertible range [0, {hi:.6f}]"
        )
    out = _core.invert_distortion_bisect(
        np.ascontiguousarray(np.clip(arr, 0.0, hi)),
        *coeffs.as_tuple(),
        HALF_PI,
        EXACT_SOLVER_TOL,
    )
    if np.isscalar(theta_d) or np.ndim(theta_d) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class DistortionTable:
    """Monotone theta <-> theta_d grid supporting lookups in both directions."""

    theta_grid: np.ndarray
    theta_d_grid: np.ndarray
    coeffs: DistortionCoeffs = field(default_factory=DistortionCoeffs)

    @property
    def n_grids(self) -> int:
        return len(self.theta_grid)

    @property
    def theta_d_range(self) -> tuple[float, float]:
        return float(self.theta_d_grid[0]), float(self.theta_d_grid[-1])


def build_lut(coeffs: DistortionCoeffs, n_grids: int = DEFAULT_N_GRIDS) -> DistortionTable:
    """Sample the forward map on a uniform theta grid over [0, pi/2].

    Raises MonotonicityViolation (with the first offending index) when the
    sampled theta_d values fail to be strictly increasing, which rejects
    coefficient sets whose map folds over inside the field of view.
    """
    if n_grids < 2:
        raise DomainError("n_grids must be at least 2")
    theta_grid = np.linspace(0.0, HALF_PI, n_grids)
    theta_d_grid = theta_d_from_theta(theta_grid, coeffs)
    diffs = np.diff(theta_d_grid)
    bad = np.nonzero(diffs <= 0.0)[0]
    if bad.size:
        raise MonotonicityViolation(int(bad[0]) + 1)
    return DistortionTable(theta_grid, theta_d_grid, coeffs)


def lut_theta_from_theta_d(table: DistortionTable, theta_d):
    """Inverse lookup: binary search for the bracketing cell, then lerp.

    Out-of-range arguments raise explicitly; there is no silent clamping.
    """
    arr = np.atleast_1d(np.asarray(theta_d, dtype=np.float64))
    lo, hi = table.theta_d_range
    if np.any(arr < lo) or np.any(arr > hi):
        raise OutOfRange(f"theta_d outside table range [{lo:.6f}, {hi:.6f}]")
    out = _core.table_lookup(
        np.ascontiguousarray(arr), table.theta_d_grid, table.theta_grid
    )
    if np.isscalar(theta_d) or np.ndim(theta_d) == 0:
        return float(out[0])
    return out


def lut_theta_d_from_theta(table: DistortionTable, theta):
    """Forward lookup on the same table (theta is the uniform axis)."""
    arr = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if np.any(arr < 0.0) or np.any(arr > HALF_PI):
        raise OutOfRange("theta outside table range [0, pi/2]")
    out = _core.table_lookup(
        np.ascontiguousarray(arr), table.theta_grid, table.theta_d_grid
    )
    if np.isscalar(theta) or np.ndim(theta) == 0:
        return float(out[0])
    return out
