"""Joint spectral amplitude assembly: pump envelope x phase matching x filters.

The two-photon amplitude on a square frequency grid is

    f(nu_s, nu_i) = alpha(nu_s + nu_i) * phi(nu_s, nu_i)
                    * sqrt(T_s(nu_s) * T_i(nu_i))

then L2-normalized.  alpha is a transform-limited Gaussian pump envelope,
phi = sinc(dk L / 2) the quasi-phase-matching amplitude, and T the intensity
transmission of each collection arm (long-pass edge times a broad Gaussian
apodization, or a tabulated curve).  All factors are real and non-negative,
so the default JSA is real; downstream code accepts complex grids but then
only the general |g|^2 route is valid.

Under the group-velocity-matched Taylor backend both alpha and phi depend on
nu_s + nu_i only, so with identical arm filters f is exchange symmetric by
construction (bit-exact on the grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    C_NM_THZ,
    DomainError,
    FreqGrid1D,
    ResolutionError,
    fwhm_from_samples,
    integrate_2d,
    wavelength_to_frequency,
)
from .dispersion import CrystalSpec, phase_mismatch

#: Gaussian time-bandwidth product, intensity FWHM x intensity FWHM.
TIME_BANDWIDTH_GAUSSIAN = 2.0 * math.log(2.0) / math.pi


@dataclass(frozen=True)
class PumpSpec:
    """Transform-limited Gaussian pump pulse (no chirp)."""

    center_nm: float = 792.0
    fwhm_ps: float = 2.0

    def __post_init__(self):
        if not (self.center_nm > 0.0):
            raise DomainError("pump center wavelength must be > 0")
        if not (self.fwhm_ps > 0.0):
            raise DomainError("pump duration must be > 0")

    @property
    def center_thz(self) -> float:
        return wavelength_to_frequency(self.center_nm)

    @property
    def intensity_fwhm_thz(self) -> float:
        """Spectral intensity FWHM of |alpha|^2, from the Gaussian TBP."""
        return TIME_BANDWIDTH_GAUSSIAN / self.fwhm_ps

    @property
    def sigma_nu_thz(self) -> float:
        """Std dev of the amplitude envelope alpha = exp(-x^2 / 2 sigma^2)."""
        return self.intensity_fwhm_thz / (2.0 * math.sqrt(math.log(2.0)))


def pump_envelope(pump: PumpSpec, nu_sum_thz):
    """alpha(nu_s + nu_i): real, positive, peak value 1 at the pump frequency."""
    x = np.asarray(nu_sum_thz, dtype=float) - pump.center_thz
    out = np.exp(-(x * x) / (2.0 * pump.sigma_nu_thz ** 2))
    return float(out) if np.ndim(nu_sum_thz) == 0 else out


@dataclass(frozen=True)
class FilterSpec:
    """Intensity transmission of one collection arm, T(lambda) in [0, 1].

    Components multiply; each may be disabled:

    * long-pass logistic edge: cut-on wavelength ``lpf_cuton_nm`` with a
      10-90% width ``lpf_edge_nm``,
    * Gaussian apodization: intensity FWHM ``apod_fwhm_nm`` centered at
      ``apod_center_nm`` (smooth source/collection roll-off),
    * tabulated curve: two columns (lambda nm strictly increasing, T in
      [0, 1]), linearly interpolated, clamped to its end values.
    """

    lpf_cuton_nm: float | None = None
    lpf_edge_nm: float = 5.0
    apod_center_nm: float | None = None
    apod_fwhm_nm: float | None = None
    table_lambda_nm: tuple = ()
    table_t: tuple = ()

    def __post_init__(self):
        if self.lpf_cuton_nm is not None and not (self.lpf_edge_nm > 0.0):
            raise DomainError("long-pass edge width must be > 0 nm")
        if (self.apod_fwhm_nm is None) != (self.apod_center_nm is None):
            raise DomainError("apodization needs both center and FWHM")
        if self.apod_fwhm_nm is not None and not (self.apod_fwhm_nm > 0.0):
            raise DomainError("apodization FWHM must be > 0 nm")
        if len(self.table_lambda_nm) != len(self.table_t):
            raise DomainError("tabulated filter columns differ in length")
        if self.table_lambda_nm:
            lam = np.asarray(self.table_lambda_nm, dtype=float)
            t = np.asarray(self.table_t, dtype=float)
            if np.any(np.diff(lam) <= 0.0):
                raise DomainError("tabulated wavelengths must be strictly increasing")
            if np.any(t < 0.0) or np.any(t > 1.0):
                raise DomainError("tabulated transmission must lie in [0, 1]")

    def transmission(self, lambda_nm):
        lam = np.asarray(lambda_nm, dtype=float)
        t = np.ones_like(lam)
        if self.lpf_cuton_nm is not None:
            # Logistic long-pass; scale chosen so the 10-90% span equals
            # lpf_edge_nm (u runs over 2 ln 9 across that span).
            scale = self.lpf_edge_nm / (2.0 * math.log(9.0))
            z = np.clip((lam - self.lpf_cuton_nm) / scale, -700.0, 700.0)
            t = t / (1.0 + np.exp(-z))
        if self.apod_fwhm_nm is not None:
            x = lam - self.apod_center_nm
            t = t * np.exp(-4.0 * math.log(2.0) * x * x / self.apod_fwhm_nm ** 2)
        if self.table_lambda_nm:
            t = t * np.interp(lam, np.asarray(self.table_lambda_nm), np.asarray(self.table_t))
        return float(t) if np.ndim(lambda_nm) == 0 else t

    def transmission_nu(self, nu_thz):
        return self.transmission(C_NM_THZ / np.asarray(nu_thz, dtype=float))


def load_filter_table(path) -> FilterSpec:
    """Tabulated filter file: two whitespace columns, lambda(nm) and T."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise DomainError("tabulated filter file needs exactly two columns")
    return FilterSpec(table_lambda_nm=tuple(data[:, 0]), table_t=tuple(data[:, 1]))


def phase_matching_amplitude(crystal: CrystalSpec, nu_s, nu_i):
    """phi = sinc(dk L / 2) with sinc(x) = sin(x)/x, sinc(0) = 1; real."""
    dk = phase_mismatch(crystal, nu_s, nu_i)
    arg = 0.5 * np.asarray(dk, dtype=float) * crystal.length_mm
    # np.sinc is the normalized variant sin(pi x)/(pi x).
    out = np.sinc(arg / np.pi)
    return float(out) if np.ndim(nu_s) == 0 and np.ndim(nu_i) == 0 else out


@dataclass(frozen=True)
class JsaGrid:
    """Joint spectral amplitude on a square frequency grid.

    ``values[i, j]`` is f(nu_s = axis[i], nu_i = axis[j]); real dtype when
    the amplitude carries no spectral phase.
    """

    grid: FreqGrid1D
    values: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        if self.values.shape != (self.grid.n, self.grid.n):
            raise DomainError("JSA values do not match the grid")
        self.values.setflags(write=False)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def l2_mass(self) -> float:
        return integrate_2d(np.abs(self.values) ** 2, self.grid, self.grid)


def _edge_mass_fraction(intensity: np.ndarray, margin: int = 2) -> float:
    total = float(intensity.sum())
    if total == 0.0:
        return 0.0
    interior = float(intensity[margin:-margin, margin:-margin].sum())
    return (total - interior) / total


def assemble_jsa(pump: PumpSpec, crystal: CrystalSpec,
                 filter_signal: FilterSpec, filter_idler: FilterSpec,
                 grid: FreqGrid1D, normalize: bool = True) -> JsaGrid:
    """Build f = alpha * phi * sqrt(T_s T_i) on the grid and L2-normalize.

    Raises :class:`ResolutionError` if more than 1e-4 of the unnormalized
    L2 mass sits within 2 samples of the grid edge (support truncation).
    """
    nu = grid.values()
    nu_s = nu[:, None]
    nu_i = nu[None, :]
    alpha = pump_envelope(pump, nu_s + nu_i)
    phi = phase_matching_amplitude(crystal, nu_s, nu_i)
    t_s = filter_signal.transmission_nu(nu)
    t_i = filter_idler.transmission_nu(nu)
    f = alpha * phi * np.sqrt(t_s[:, None] * t_i[None, :])
    intensity = f * f
    if _edge_mass_fraction(intensity) > 1e-4:
        raise ResolutionError(
            "more than 1e-4 of the JSA mass lies within 2 samples of the grid "
            "edge; widen the grid span"
        )
    if normalize:
        mass = integrate_2d(intensity, grid, grid)
        if mass <= 0.0:
            raise DomainError("JSA has zero mass on this grid")
        f = f / math.sqrt(mass)
    return JsaGrid(grid=grid, values=f, normalized=normalize)


@dataclass(frozen=True)
class MarginalSpectrum:
    """Single-photon marginal S(nu) = integral |f|^2 d nu_other."""

    grid: FreqGrid1D
    values: np.ndarray
    fwhm_thz: float
    lo_thz: float
    hi_thz: float
    multimodal: bool

    @property
    def center_thz(self) -> float:
        return 0.5 * (self.lo_thz + self.hi_thz)

    @property
    def center_nm(self) -> float:
        return C_NM_THZ / self.center_thz

    @property
    def fwhm_nm(self) -> float:
        """Width between the half-maximum crossings converted to wavelength."""
        return C_NM_THZ / self.lo_thz - C_NM_THZ / self.hi_thz


def marginal_spectrum(jsa: JsaGrid, axis: int = 0) -> MarginalSpectrum:
    """Marginal intensity along one photon axis with its measured FWHM.

    ``axis=0`` integrates out the idler (signal spectrum), ``axis=1`` the
    signal.  A spectrum with more than two half-maximum crossings reports
    the widest pair and sets ``multimodal``.
    """
    if axis not in (0, 1):
        raise DomainError("axis must be 0 (signal) or 1 (idler)")
    intensity = np.abs(jsa.values) ** 2
    other = 1 - axis
    s = np.trapezoid(intensity, dx=jsa.grid.spacing, axis=other)
    width, lo, hi, n_cross = fwhm_from_samples(jsa.grid.values(), s)
    return MarginalSpectrum(
        grid=jsa.grid,
        values=s,
        fwhm_thz=width,
        lo_thz=lo,
        hi_thz=hi,
        multimodal=n_cross > 2,
    )


def _bisect_monotone(fn, lo, hi, target, tol, max_iter=80):
    f_lo = fn(lo) - target
    f_hi = fn(hi) - target
    if f_lo * f_hi > 0.0:
        raise DomainError("calibration target not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid) - target
        if abs(f_mid) < tol or (hi - lo) < 1e-9:
            return mid
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def calibrate_apodization(pump: PumpSpec, crystal: CrystalSpec, grid: FreqGrid1D,
                          target_marginal_fwhm_nm: float,
                          center_nm: float = 1584.0,
                          bracket_nm=(10.0, 200.0)) -> float:
    """Apodization FWHM (nm) that yields the target unfiltered marginal width."""

    def measured(apod_fwhm):
        flt = FilterSpec(apod_center_nm=center_nm, apod_fwhm_nm=apod_fwhm)
        jsa = assemble_jsa(pump, crystal, flt, flt, grid)
        return marginal_spectrum(jsa, axis=0).fwhm_nm

    return _bisect_monotone(measured, *bracket_nm, target_marginal_fwhm_nm, 1e-4)


def calibrate_lpf_cuton(pump: PumpSpec, crystal: CrystalSpec, grid: FreqGrid1D,
                        base_filter: FilterSpec,
                        target_marginal_fwhm_nm: float,
                        bracket_nm=(1530.0, 1583.0)) -> float:
    """Long-pass cut-on (nm) that trims the marginal to the target width.

    Because signal and idler are anti-correlated, the long-pass edge on each
    arm truncates both wings of either marginal, so the map from cut-on to
    width is monotone (higher cut-on -> narrower marginal).
    """

    def measured(cuton):
        flt = FilterSpec(
            lpf_cuton_nm=cuton,
            lpf_edge_nm=base_filter.lpf_edge_nm,
            apod_center_nm=base_filter.apod_center_nm,
            apod_fwhm_nm=base_filter.apod_fwhm_nm,
        )
        jsa = assemble_jsa(pump, crystal, flt, flt, grid)
        return -marginal_spectrum(jsa, axis=0).fwhm_nm

    return _bisect_monotone(measured, *bracket_nm, -target_marginal_fwhm_nm, 1e-4)
