"""Units, conversions, and uniform frequency grids.

Conventions used throughout the package:

* Optical frequencies are ordinary frequencies in THz (nu = omega / 2pi).
  Equations that are usually written in angular frequency acquire explicit
  2pi factors at the point of use, e.g. cos((w1 - w2) tau) becomes
  cos(2 pi (nu1 - nu2) tau).
* Vacuum wavelengths are in nm, delay times in ps, crystal lengths in mm,
  poling periods in um, fiber arrival times in ns.
* All grids are uniform; integrals are trapezoidal.

Everything here is a pure function or an immutable container, safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Speed of light, exact, in nm*THz (equivalently nm/ps).
C_NM_THZ = 299_792.458

#: Speed of light in um/ps (delay-stage math) and mm/ps (crystal math).
C_UM_PS = C_NM_THZ * 1e-3
C_MM_PS = C_NM_THZ * 1e-6


class QcombError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QcombError):
    """Input outside the physically or numerically valid domain."""


class ResolutionError(QcombError):
    """Grid, scan or histogram resolution too coarse for the request."""


class SolverError(QcombError):
    """Root finding failed (no bracket / no sign change)."""


class ValidationError(QcombError):
    """Configuration rejected.  ``field`` holds the offending field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def wavelength_to_frequency(lambda_nm):
    """Convert vacuum wavelength (nm) to ordinary frequency (THz).

    nu = c / lambda with c = 299792.458 nm*THz exactly.
    """
    lam = np.asarray(lambda_nm, dtype=float)
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0.0):
        raise DomainError("wavelength must be finite and > 0 nm")
    nu = C_NM_THZ / lam
    return float(nu) if np.ndim(lambda_nm) == 0 else nu


def frequency_to_wavelength(nu_thz):
    """Convert ordinary frequency (THz) to vacuum wavelength (nm)."""
    nu = np.asarray(nu_thz, dtype=float)
    if not np.all(np.isfinite(nu)) or np.any(nu <= 0.0):
        raise DomainError("frequency must be finite and > 0 THz")
    lam = C_NM_THZ / nu
    return float(lam) if np.ndim(nu_thz) == 0 else lam


def delay_position_to_time(position_um):
    """Convert a delay-stage position (um) to a delay time (ps).

    Single-pass convention: tau = d / c.  Negative positions are allowed;
    the interference observables are even in tau.
    """
    d = np.asarray(position_um, dtype=float)
    if not np.all(np.isfinite(d)):
        raise DomainError("delay position must be finite")
    tau = d / C_UM_PS
    return float(tau) if np.ndim(position_um) == 0 else tau


def delay_time_to_position(tau_ps):
    """Inverse of :func:`delay_position_to_time` (ps -> um)."""
    tau = np.asarray(tau_ps, dtype=float)
    if not np.all(np.isfinite(tau)):
        raise DomainError("delay time must be finite")
    d = tau * C_UM_PS
    return float(d) if np.ndim(tau_ps) == 0 else d


@dataclass(frozen=True)
class FreqGrid1D:
    """Uniform frequency grid: ``n`` samples covering center +- span/2."""

    center_thz: float
    span_thz: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("grid needs n >= 2 samples")
        if not (np.isfinite(self.center_thz) and np.isfinite(self.span_thz)):
            raise DomainError("grid center/span must be finite")
        if self.span_thz <= 0.0:
            raise DomainError("grid span must be > 0")

    @property
    def spacing(self) -> float:
        return self.span_thz / (self.n - 1)

    @property
    def lo(self) -> float:
        return self.center_thz - 0.5 * self.span_thz

    @property
    def hi(self) -> float:
        return self.center_thz + 0.5 * self.span_thz

    def values(self) -> np.ndarray:
        v = np.linspace(self.lo, self.hi, self.n)
        v.setflags(write=False)
        return v

    def trapezoid_weights(self) -> np.ndarray:
        w = np.ones(self.n)
        w[0] = w[-1] = 0.5
        w.setflags(write=False)
        return w


@dataclass(frozen=True)
class Grid2D:
    """Values sampled on the tensor product of two frequency grids.

    ``values[i, j]`` corresponds to ``(axis1[i], axis2[j])``.
    """

    axis1: FreqGrid1D
    axis2: FreqGrid1D
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.axis1.n, self.axis2.n):
            raise DomainError(
                f"grid shape {self.values.shape} does not match axes "
                f"({self.axis1.n}, {self.axis2.n})"
            )
        self.values.setflags(write=False)

    @property
    def is_square(self) -> bool:
        return self.axis1 == self.axis2


def integrate_1d(values, grid: FreqGrid1D) -> float:
    """Trapezoidal quadrature of samples on a uniform grid.

    Linear in ``values`` and exact for affine integrands.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n,):
        raise DomainError(f"expected {grid.n} samples, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise DomainError("samples must be finite")
    return float(np.trapezoid(values, dx=grid.spacing))


def integrate_2d(values, grid1: FreqGrid1D, grid2: FreqGrid1D) -> float:
    """Trapezoidal quadrature over a 2D uniform grid."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid1.n, grid2.n):
        raise DomainError(
            f"expected shape ({grid1.n}, {grid2.n}), got {values.shape}"
        )
    inner = np.trapezoid(values, dx=grid2.spacing, axis=1)
    return float(np.trapezoid(inner, dx=grid1.spacing))


def trapezoid_weights_2d(n1: int, n2: int) -> np.ndarray:
    """Outer product of 1D trapezoid end-point weights."""
    w1 = np.ones(n1)
    w1[0] = w1[-1] = 0.5
    w2 = np.ones(n2)
    w2[0] = w2[-1] = 0.5
    return np.outer(w1, w2)


def diagonal_trapezoid_sums(matrix: np.ndarray, spacing: float) -> np.ndarray:
    """Trapezoidal line integrals along every diagonal of a square matrix.

    For an n x n matrix M sampled on a square grid with step ``spacing``,
    returns K of length 2n - 1 with

        K[m + n - 1] = integral over i of M[i, i + m]

    i.e. the diagonal offset m = j - i corresponds to the frequency
    difference axis2 - axis1 = m * spacing.  Single-sample diagonals
    (the far corners) integrate to zero.
    """
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise DomainError("diagonal sums require a square matrix")
    out = np.empty(2 * n - 1, dtype=float)
    for m in range(-(n - 1), n):
        d = np.diagonal(matrix, offset=m)
        if d.size < 2:
            out[m + n - 1] = 0.0
        else:
            out[m + n - 1] = (d.sum() - 0.5 * (d[0] + d[-1])) * spacing
    return out


def fwhm_from_samples(x: np.ndarray, y: np.ndarray):
    """Full width at half maximum by linear interpolation between crossings.

    Returns ``(width, lo, hi, n_crossings)`` where lo/hi are the outermost
    half-maximum crossings.  A unimodal curve has exactly 2 crossings; more
    than 2 indicates a multi-modal signal and the widest pair is reported.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    top = float(np.max(y))
    if top <= 0.0:
        raise DomainError("cannot measure FWHM of a non-positive signal")
    half = 0.5 * top
    above = y >= half
    idx = np.flatnonzero(above[:-1] != above[1:])
    if idx.size < 2:
        raise ResolutionError("half-maximum crossings not resolved by the grid")
    crossings = []
    for i in idx:
        x0, x1 = x[i], x[i + 1]
        y0, y1 = y[i], y[i + 1]
        crossings.append(x0 + (half - y0) * (x1 - x0) / (y1 - y0))
    lo, hi = min(crossings), max(crossings)
    return hi - lo, lo, hi, int(idx.size)
