"""Hong-Ou-Mandel engine: exchange amplitude, CSI, dip scan, comb analytics.

After the delay tau and the 50/50 beamsplitter, a coincidence postselects
the exchange amplitude

    g(nu1, nu2, tau) = f(nu1, nu2) - f(nu2, nu1) exp(-i 2 pi (nu1 - nu2) tau)

The correlated spectral intensity is I = |g|^2; for a real amplitude it
reduces to

    I = f(nu1,nu2)^2 + f(nu2,nu1)^2
        - 2 f(nu1,nu2) f(nu2,nu1) cos(2 pi (nu1 - nu2) tau)

The coincidence probability is P(tau) = 1/4 integral I, the arrival-time
marginal is H(dnu) = integral I(nu1, nu1 + dnu) d nu1, and the comb teeth
sit where the cosine equals -1: dnu = (2j - 1) / (2 tau), spacing 1 / tau.

Sign convention: positive tau retards channel 2, i.e. the conjugate phase
exp(-i 2 pi dnu tau); observables depend on tau only through the cosine, so
the sign is unobservable but recorded here for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    C_UM_PS,
    DomainError,
    FreqGrid1D,
    ResolutionError,
    diagonal_trapezoid_sums,
    integrate_2d,
)
from .biphoton import JsaGrid

_TWO_PI = 2.0 * math.pi

#: Default peak-detection threshold, as a fraction of the tallest peak.
PEAK_THRESHOLD_FRAC = 0.05


def interference_amplitude(jsa: JsaGrid, tau_ps: float) -> np.ndarray:
    """Exchange amplitude g(nu1, nu2, tau) on the (square) JSA grid."""
    f = jsa.values
    nu = jsa.grid.values()
    dnu = nu[:, None] - nu[None, :]
    phase = np.exp(-1j * _TWO_PI * dnu * tau_ps)
    return f - f.T * phase


@dataclass(frozen=True)
class CsiGrid:
    """Correlated spectral intensity I(nu1, nu2; tau) >= 0 on a square grid.

    ``total`` is the normalization N = integral I; ``general_route`` records
    that the |g|^2 path was used because the amplitude carried phase.
    """

    grid: FreqGrid1D
    values: np.ndarray
    tau_ps: float
    total: float
    general_route: bool = False

    def __post_init__(self):
        self.values.setflags(write=False)


def csi(jsa: JsaGrid, tau_ps: float, validate: bool = True) -> CsiGrid:
    """Correlated spectral intensity at delay tau.

    Real amplitudes use the simplified cosine form; complex amplitudes are
    silently routed through |g|^2 with ``general_route`` set.  The exchange
    symmetry I(nu1, nu2) = I(nu2, nu1) and the diagonal darkness
    I(nu, nu) = 0 are verified on every evaluation.
    """
    nu = jsa.grid.values()
    general = not jsa.is_real
    if general:
        g = interference_amplitude(jsa, tau_ps)
        intensity = (g * g.conj()).real
    else:
        f = jsa.values
        dnu = nu[:, None] - nu[None, :]
        cos = np.cos(_TWO_PI * dnu * tau_ps)
        intensity = f * f + f.T * f.T - 2.0 * (f * f.T) * cos
    np.maximum(intensity, 0.0, out=intensity)
    if validate:
        peak = float(intensity.max())
        if peak > 0.0:
            asym = float(np.abs(intensity - intensity.T).max())
            if asym > 1e-9 * peak:
                raise DomainError("CSI lost its exchange symmetry (numerical fault)")
            diag = float(np.abs(np.diagonal(intensity)).max())
            if diag > 1e-12 * peak:
                raise DomainError("CSI diagonal is not dark (numerical fault)")
    total = integrate_2d(intensity, jsa.grid, jsa.grid)
    return CsiGrid(grid=jsa.grid, values=intensity, tau_ps=tau_ps,
                   total=total, general_route=general)


def coincidence_probability(jsa: JsaGrid, tau_ps: float) -> float:
    """P(tau) = 1/4 integral I(nu1, nu2, tau); in [0, 1] for a normalized JSA."""
    return 0.25 * csi(jsa, tau_ps, validate=False).total


def _dip_kernel(jsa: JsaGrid):
    """Reduce the exchange product to the frequency-difference axis.

    Returns (dnu, K) such that integral f12 f21 cos(2 pi dnu tau) d2nu
    = sum K(dnu) cos(2 pi dnu tau) * spacing; this makes a delay scan cost
    O(n) per sample instead of O(n^2).
    """
    f = jsa.values
    if np.iscomplexobj(f):
        raise DomainError("the fast dip kernel requires a real amplitude")
    h = jsa.grid.spacing
    k = diagonal_trapezoid_sums(f * f.T, h)
    n = jsa.grid.n
    dnu = (np.arange(2 * n - 1) - (n - 1)) * h
    return dnu, k


@dataclass(frozen=True)
class DipMetrics:
    """Visibility and width of a coincidence dip."""

    p_baseline: float
    p_min: float
    tau_min_ps: float
    visibility: float
    fwhm_ps: float

    @property
    def fwhm_fs(self) -> float:
        return self.fwhm_ps * 1e3

    @property
    def fwhm_um(self) -> float:
        """Width expressed as delay-stage travel (single pass)."""
        return self.fwhm_ps * C_UM_PS


@dataclass(frozen=True)
class DipScan:
    """Sampled coincidence probability P(tau) with derived metrics."""

    tau_ps: np.ndarray
    p: np.ndarray
    metrics: DipMetrics
    accidental_floor: float = 0.0

    def __post_init__(self):
        self.tau_ps.setflags(write=False)
        self.p.setflags(write=False)


def dip_scan(jsa: JsaGrid, tau_min_ps: float, tau_max_ps: float, n: int,
             accidental_floor: float = 0.0) -> DipScan:
    """Scan P(tau) over a delay range and attach dip metrics.

    The baseline P_inf is the mean of the outermost 10% of samples (5% at
    each end); visibility is (P_inf - P_min) / P_inf.  The FWHM is measured
    at half depth with linear interpolation.  An optional accidental floor
    is added to every sample before the metrics are computed, which models
    background coincidences and degrades the visibility.
    """
    if n < 11:
        raise DomainError("a dip scan needs at least 11 samples")
    if not tau_max_ps > tau_min_ps:
        raise DomainError("empty delay range")
    if accidental_floor < 0.0:
        raise DomainError("accidental floor must be >= 0")
    taus = np.linspace(tau_min_ps, tau_max_ps, n)
    dnu, kern = _dip_kernel(jsa)
    h = jsa.grid.spacing
    cross = (np.cos(_TWO_PI * np.outer(taus, dnu)) @ kern) * h
    p = 0.5 * (1.0 - cross) + accidental_floor
    # The normalized cross term can only exceed 1 by quadrature noise.
    np.clip(p, 0.0, None, out=p)

    i_min = int(np.argmin(p))
    if i_min < 2 or i_min > n - 3:
        raise ResolutionError(
            "dip not resolved: minimum within 2 samples of the scan edge"
        )
    n_edge = max(2, int(round(0.05 * n)))
    p_inf = float(np.mean(np.concatenate([p[:n_edge], p[-n_edge:]])))
    if p_inf <= 0.0:
        raise ResolutionError("dip baseline is not positive")
    p_min = float(p[i_min])
    visibility = (p_inf - p_min) / p_inf
    half_level = p_inf - 0.5 * (p_inf - p_min)

    def cross_left():
        for i in range(i_min, 0, -1):
            if p[i - 1] >= half_level >= p[i]:
                frac = (half_level - p[i]) / (p[i - 1] - p[i])
                return taus[i] - frac * (taus[i] - taus[i - 1])
        raise ResolutionError("left half-depth crossing not inside the scan range")

    def cross_right():
        for i in range(i_min, n - 1):
            if p[i] <= half_level <= p[i + 1]:
                frac = (half_level - p[i]) / (p[i + 1] - p[i])
                return taus[i] + frac * (taus[i + 1] - taus[i])
        raise ResolutionError("right half-depth crossing not inside the scan range")

    fwhm = cross_right() - cross_left()
    if 5.0 * fwhm > (tau_max_ps - tau_min_ps):
        raise ResolutionError(
            "dip not resolved: scan range is below 5x the measured width, so "
            "the baseline estimate is unreliable; widen the delay range"
        )
    metrics = DipMetrics(
        p_baseline=p_inf,
        p_min=p_min,
        tau_min_ps=float(taus[i_min]),
        visibility=float(visibility),
        fwhm_ps=float(fwhm),
    )
    return DipScan(tau_ps=taus, p=p, metrics=metrics,
                   accidental_floor=accidental_floor)


@dataclass(frozen=True)
class PeakSet:
    """Detected local maxima: positions strictly increasing."""

    positions: np.ndarray
    heights: np.ndarray
    indices: np.ndarray
    threshold: float

    def __post_init__(self):
        self.positions.setflags(write=False)
        self.heights.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def count(self) -> int:
        return int(self.positions.size)

    def central_gap(self) -> float:
        """Distance between the two peaks closest to position zero.

        For a comb this estimates the tooth spacing on the envelope plateau,
        where the teeth are not pulled inward by the envelope slope.
        """
        pos = self.positions
        neg = pos[pos < 0.0]
        nonneg = pos[pos >= 0.0]
        if neg.size == 0 or nonneg.size == 0:
            if pos.size < 2:
                raise DomainError("need at least two peaks for a gap")
            gaps = np.diff(pos)
            return float(gaps[np.argmin(np.abs(pos[:-1] + 0.5 * gaps))])
        return float(nonneg.min() - neg.max())


def find_peaks(values, threshold_frac: float, min_separation: int,
               positions=None, min_prominence_frac: float = 0.0) -> PeakSet:
    """Local maxima above threshold_frac * max with non-maximum suppression.

    Candidates are strict local maxima (plateaus count once, at their first
    sample).  Peaks closer than ``min_separation`` samples to a taller peak
    are suppressed; ties break toward the lower index.  The optional
    prominence filter drops bumps whose height above the surrounding
    valleys is less than ``min_prominence_frac`` of their own height, which
    suppresses sampling noise riding on a smooth envelope.
    """
    y = np.asarray(values, dtype=float)
    if not (0.0 < threshold_frac < 1.0):
        raise DomainError("threshold fraction must lie in (0, 1)")
    if min_separation < 2:
        raise DomainError("minimum separation must be >= 2 samples")
    n = y.size
    if positions is None:
        positions = np.arange(n, dtype=float)
    else:
        positions = np.asarray(positions, dtype=float)
    top = float(y.max(initial=0.0))
    if top <= 0.0:
        empty = np.empty(0)
        return PeakSet(empty, empty.copy(), np.empty(0, dtype=int), 0.0)
    threshold = threshold_frac * top

    candidates = []
    i = 1
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j < n - 1 and y[j + 1] == y[j]:
                j += 1
            if j < n - 1 and y[j + 1] < y[j]:
                if y[i] >= threshold:
                    candidates.append(i)
            i = j + 1
        else:
            i += 1

    if min_prominence_frac > 0.0:
        kept = []
        for i in candidates:
            lo = y[:i + 1][::-1]
            higher = np.flatnonzero(lo > y[i])
            left_min = lo[: higher[0]].min() if higher.size else y[: i + 1].min()
            hi = y[i:]
            higher = np.flatnonzero(hi > y[i])
            right_min = hi[: higher[0]].min() if higher.size else y[i:].min()
            prominence = y[i] - max(left_min, right_min)
            if prominence >= min_prominence_frac * y[i]:
                kept.append(i)
        candidates = kept

    # Non-maximum suppression, tallest first; equal heights keep lower index.
    order = sorted(candidates, key=lambda i: (-y[i], i))
    kept = []
    for i in order:
        if all(abs(i - j) >= min_separation for j in kept):
            kept.append(i)
    kept.sort()
    idx = np.asarray(kept, dtype=int)
    return PeakSet(
        positions=positions[idx].astype(float),
        heights=y[idx].astype(float),
        indices=idx,
        threshold=threshold,
    )


@dataclass(frozen=True)
class ToaSpectrum:
    """Frequency-difference marginal H(dnu) with its detected comb peaks.

    ``no_comb`` is set when no peaks survive the threshold (the dip-center
    case, where the intensity vanishes identically for an ideal source).
    """

    dnu_thz: np.ndarray
    values: np.ndarray
    tau_ps: float
    peaks: PeakSet

    def __post_init__(self):
        self.dnu_thz.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def no_comb(self) -> bool:
        return self.peaks.count == 0

    def integral(self) -> float:
        h = self.dnu_thz[1] - self.dnu_thz[0]
        return float(np.trapezoid(self.values, dx=h))

    def tooth_spacing(self) -> float:
        """Comb period measured from the dark fringes between the teeth.

        The bright maxima ride the spectral envelope and get pulled toward
        the center on its slopes; the interference zeros sit exactly at
        multiples of 1/tau regardless of the envelope, so the median gap
        between consecutive minima (with parabolic sub-sample refinement)
        is the robust period estimate.
        """
        idx = self.peaks.indices
        if idx.size < 2:
            raise DomainError("need at least two teeth to measure a spacing")
        h = float(self.dnu_thz[1] - self.dnu_thz[0])
        valleys = []
        for a, b in zip(idx[:-1], idx[1:]):
            k = a + int(np.argmin(self.values[a:b + 1]))
            pos = self.dnu_thz[k]
            if 0 < k < self.values.size - 1:
                y0, y1, y2 = self.values[k - 1:k + 2]
                denom = y0 - 2.0 * y1 + y2
                if denom > 0.0:
                    pos = pos + 0.5 * h * (y0 - y2) / denom
            valleys.append(pos)
        if len(valleys) < 2:
            raise DomainError("need at least two dark fringes to measure a spacing")
        return float(np.median(np.diff(valleys)))


def tooth_separation_samples(tau_ps: float, spacing_thz: float) -> int:
    """Half the analytic tooth spacing 1/tau, in grid samples (min 2)."""
    if tau_ps == 0.0:
        return 2
    return max(2, int(round(1.0 / (2.0 * abs(tau_ps) * spacing_thz))))


def marginal_toa(csi_grid: CsiGrid,
                 threshold_frac: float = PEAK_THRESHOLD_FRAC) -> ToaSpectrum:
    """H(dnu) = integral I(nu1, nu1 + dnu) d nu1 on a uniform dnu grid.

    H is even in dnu for the exchange-symmetric CSI.  Peaks are counted
    with the default 5% threshold and a minimum separation of half the
    analytic tooth spacing.
    """
    h = csi_grid.grid.spacing
    values = diagonal_trapezoid_sums(csi_grid.values, h)
    n = csi_grid.grid.n
    dnu = (np.arange(2 * n - 1) - (n - 1)) * h
    sep = tooth_separation_samples(csi_grid.tau_ps, h)
    peaks = find_peaks(values, threshold_frac, sep, positions=dnu)
    return ToaSpectrum(dnu_thz=dnu, values=values, tau_ps=csi_grid.tau_ps,
                       peaks=peaks)


@dataclass(frozen=True)
class QuditTooth:
    """One comb tooth of the postselected state.

    ``nu_plus_thz`` / ``nu_minus_thz`` are the basis-mode frequencies on the
    energy-conservation ridge, nu_pm = nu_p / 2 +- (2|j| - 1) / (4 tau), so
    their sum is the pump frequency by construction.  The ``measured_*``
    fields are the intensity centroids over the tooth cell; for teeth on a
    filter edge the centroid slides along the ridge by about
    sigma_ridge^2 x (edge log-slope) / 2, so measured_nu1 + measured_nu2
    can sit a few grid samples below the pump frequency there.
    """

    j: int
    dnu_thz: float
    nu_plus_thz: float
    nu_minus_thz: float
    weight: float
    measured_nu1_thz: float
    measured_nu2_thz: float


@dataclass(frozen=True)
class QuditDecomposition:
    """Comb teeth of the postselected state with normalized weights.

    Teeth sit at dnu_j = sign(j) (2|j| - 1) / (2 tau); weights are the
    square roots of the intensity integrated over each tooth's cell of
    width 1/tau on the dnu axis (its Voronoi cell), normalized so
    sum weight^2 = 1 over the detected teeth.
    """

    tau_ps: float
    pump_nu_thz: float
    teeth: tuple

    def weights(self) -> np.ndarray:
        return np.asarray([t.weight for t in self.teeth])

    def dimension(self, min_weight: float = 0.05) -> int:
        return int(np.sum(self.weights() > min_weight))


def _interval_trapezoid(x: np.ndarray, y: np.ndarray, a: float, b: float) -> float:
    """Trapezoid integral of sampled y(x) over [a, b] with interpolated ends."""
    if b <= a:
        return 0.0
    a = max(a, float(x[0]))
    b = min(b, float(x[-1]))
    if b <= a:
        return 0.0
    xs = np.concatenate(([a], x[(x > a) & (x < b)], [b]))
    ys = np.interp(xs, x, y)
    return float(np.trapezoid(ys, xs))


def extract_qudit(csi_grid: CsiGrid, pump_nu_thz: float) -> QuditDecomposition:
    """Decompose the CSI comb into teeth with weights and centroids.

    Requires the teeth to be resolved: tooth spacing 1/tau of at least 4
    grid samples.  Tooth weights integrate the intensity over each tooth's
    cell of width 1/tau on the dnu axis; numerically empty cells (below
    1e-8 of the total) are dropped.
    """
    tau = csi_grid.tau_ps
    h = csi_grid.grid.spacing
    if tau == 0.0:
        raise DomainError("no comb exists at zero delay")
    spacing = 1.0 / abs(tau)
    if spacing < 4.0 * h:
        raise ResolutionError(
            f"comb teeth unresolved: spacing {spacing:.4g} THz is below 4 grid "
            f"samples ({4 * h:.4g} THz); use a finer grid or a smaller delay"
        )
    n = csi_grid.grid.n
    nu = csi_grid.grid.values()
    k = diagonal_trapezoid_sums(csi_grid.values, h)
    weighted = csi_grid.values * nu[:, None]
    k_nu1 = diagonal_trapezoid_sums(weighted, h)
    dnu_axis = (np.arange(2 * n - 1) - (n - 1)) * h
    dnu_max = dnu_axis[-1]

    teeth = []
    masses = []
    j = 1
    while True:
        center = (2 * j - 1) / (2.0 * abs(tau))
        if center + 0.5 * spacing > dnu_max:
            break
        for sign in (-1, 1):
            c = sign * center
            a, b = c - 0.5 * spacing, c + 0.5 * spacing
            mass = _interval_trapezoid(dnu_axis, k, a, b)
            if mass <= 1e-8 * csi_grid.total:
                continue
            nu1_bar = _interval_trapezoid(dnu_axis, k_nu1, a, b) / mass
            dnu_bar = _interval_trapezoid(dnu_axis, k * dnu_axis, a, b) / mass
            nu_plus = 0.5 * pump_nu_thz + 0.5 * abs(c)
            nu_minus = 0.5 * pump_nu_thz - 0.5 * abs(c)
            teeth.append((sign * j, c, nu_plus, nu_minus, nu1_bar, nu1_bar + dnu_bar))
            masses.append(mass)
        j += 1
    if not teeth:
        raise ResolutionError("no comb teeth detected inside the grid support")
    masses = np.asarray(masses)
    weights = np.sqrt(masses / csi_grid.total)
    weights = weights / math.sqrt(float(np.sum(weights ** 2)))
    order = np.argsort([t[1] for t in teeth])
    out = tuple(
        QuditTooth(j=teeth[i][0], dnu_thz=teeth[i][1], nu_plus_thz=teeth[i][2],
                   nu_minus_thz=teeth[i][3], weight=float(weights[i]),
                   measured_nu1_thz=teeth[i][4], measured_nu2_thz=teeth[i][5])
        for i in order
    )
    return QuditDecomposition(tau_ps=tau, pump_nu_thz=pump_nu_thz, teeth=out)


def double_slit_identity(jsa: JsaGrid, tau_ps: float) -> float:
    """Largest residual of the two-path rewrite of the CSI.

    Checks that |g|^2 equals I1 + I2 - 2 sqrt(I1 I2) cos(2 pi dnu tau) with
    I1 = f(nu1, nu2)^2 and I2 = f(nu2, nu1)^2 -- the same structure as a
    two-slit fringe pattern.  Requires a real amplitude whose exchange
    product f(nu1,nu2) f(nu2,nu1) is non-negative (otherwise the square
    root branch breaks the rewrite).
    """
    if not jsa.is_real:
        raise DomainError("the two-path identity requires a real amplitude")
    f = jsa.values
    prod = f * f.T
    peak = float(np.abs(prod).max())
    if peak > 0.0 and float(prod.min()) < -1e-12 * peak:
        raise DomainError("identity requires a non-negative exchange product")
    g = interference_amplitude(jsa, tau_ps)
    intensity = (g * g.conj()).real
    nu = jsa.grid.values()
    dnu = nu[:, None] - nu[None, :]
    i1 = f * f
    i2 = f.T * f.T
    rewrite = i1 + i2 - 2.0 * np.sqrt(i1 * i2) * np.cos(_TWO_PI * dnu * tau_ps)
    return float(np.abs(intensity - rewrite).max())


def comb_contrast(values, period_samples: float) -> float:
    """Peak-to-valley contrast of a comb-modulated signal.

    Detects peaks and valleys at the comb period, pairs each peak with its
    neighboring valleys, and averages (peak - valley) / (peak + valley)
    over peaks above 30% of the maximum.  Returns 0.0 when fewer than two
    teeth are found, i.e. when the comb has washed out.
    """
    y = np.asarray(values, dtype=float)
    if period_samples <= 0.0:
        raise DomainError("period must be positive")
    sep = max(2, int(round(0.5 * period_samples)))
    peaks = find_peaks(y, 0.3, sep, min_prominence_frac=0.05)
    if peaks.count < 2:
        return 0.0
    ratios = []
    for a, b in zip(peaks.indices[:-1], peaks.indices[1:]):
        valley = float(y[a:b + 1].min())
        top = 0.5 * (y[a] + y[b])
        if top + valley > 0.0:
            ratios.append((top - valley) / (top + valley))
    return float(np.mean(ratios)) if ratios else 0.0
