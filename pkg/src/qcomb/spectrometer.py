"""Dispersive-fiber single-photon spectrometer and time-tagging simulation.

A long single-mode fiber maps photon wavelength to arrival time through
chromatic dispersion; two gated detectors and a time tagger then turn
coincidences into a correlated spectral intensity measurement:

    t = offset + D*L * (lambda(nu) - lambda_ref)

with D*L the total dispersion in ps/nm.  The mapping is affine in
wavelength and strictly monotone, hence exactly invertible over the
calibrated band.

The Monte-Carlo chain draws photon pairs from a CSI grid (inverse CDF over
the flattened grid plus in-cell dithering), assigns each pair a trigger
slot, applies the dispersion map, Gaussian timing jitter and per-channel
detection efficiency, and optionally adds uniform-in-gate accidentals.
Every stage is driven by one seeded generator, so a batch is bit-for-bit
reproducible from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    C_NM_THZ,
    DomainError,
    FreqGrid1D,
    trapezoid_weights_2d,
)
from .interference import CsiGrid

#: FWHM -> standard deviation for a Gaussian.
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class DispersionMap:
    """Affine wavelength -> arrival-time transfer of one fiber arm.

    ``band_nm`` is the calibrated wavelength interval; queries outside it
    are rejected rather than extrapolated.
    """

    dispersion_ps_per_nm: float
    lambda_ref_nm: float
    offset_ns: float
    band_nm: tuple

    def __post_init__(self):
        if self.dispersion_ps_per_nm == 0.0:
            raise DomainError("total dispersion must be nonzero")
        lo, hi = self.band_nm
        if not (0.0 < lo < hi):
            raise DomainError("calibrated band must be a positive interval")

    @property
    def span_ns(self) -> float:
        lo, hi = self.band_nm
        return abs(self.dispersion_ps_per_nm) * (hi - lo) * 1e-3

    def time_at(self, nu_thz):
        """Arrival time (ns) for ordinary frequency nu (THz)."""
        lam = C_NM_THZ / np.asarray(nu_thz, dtype=float)
        lo, hi = self.band_nm
        if np.any(lam < lo) or np.any(lam > hi):
            raise DomainError("frequency outside the calibrated fiber band")
        t = self.offset_ns + self.dispersion_ps_per_nm * (lam - self.lambda_ref_nm) * 1e-3
        return float(t) if np.ndim(nu_thz) == 0 else t

    def freq_at(self, t_ns):
        """Exact affine inverse: arrival time (ns) -> frequency (THz)."""
        t = np.asarray(t_ns, dtype=float)
        lam = self.lambda_ref_nm + (t - self.offset_ns) * 1e3 / self.dispersion_ps_per_nm
        lo, hi = self.band_nm
        if np.any(lam < lo) or np.any(lam > hi):
            raise DomainError("arrival time outside the mapped band")
        nu = C_NM_THZ / lam
        return float(nu) if np.ndim(t_ns) == 0 else nu

    def in_band_times(self, t_ns: np.ndarray) -> np.ndarray:
        t = np.asarray(t_ns, dtype=float)
        lam = self.lambda_ref_nm + (t - self.offset_ns) * 1e3 / self.dispersion_ps_per_nm
        lo, hi = self.band_nm
        return (lam >= lo) & (lam <= hi)


def fiber_map(dispersion_ps_per_nm_km: float, length_km: float,
              lambda_ref_nm: float, offset_ns: float,
              band_nm: tuple) -> DispersionMap:
    """Convenience constructor from per-km dispersion and fiber length."""
    return DispersionMap(
        dispersion_ps_per_nm=dispersion_ps_per_nm_km * length_km,
        lambda_ref_nm=lambda_ref_nm,
        offset_ns=offset_ns,
        band_nm=band_nm,
    )


def freq_to_arrival_time(dispersion: DispersionMap, nu_thz):
    """Arrival time (ns) of a photon at ordinary frequency nu (THz)."""
    return dispersion.time_at(nu_thz)


def invert_time_to_freq(dispersion: DispersionMap, t_ns):
    """Exact affine inverse of :func:`freq_to_arrival_time`."""
    return dispersion.freq_at(t_ns)


@dataclass(frozen=True)
class DetectorSpec:
    """Gated single-photon detector: jitter, efficiency, accidentals."""

    jitter_fwhm_ps: float = 80.0
    efficiency: float = 0.7
    accidental_rate: float = 0.0  # mean accidental clicks per gate

    def __post_init__(self):
        if self.jitter_fwhm_ps < 0.0:
            raise DomainError("jitter must be >= 0")
        if not (0.0 <= self.efficiency <= 1.0):
            raise DomainError("efficiency must lie in [0, 1]")
        if self.accidental_rate < 0.0:
            raise DomainError("accidental rate must be >= 0")

    @property
    def jitter_sigma_ns(self) -> float:
        return self.jitter_fwhm_ps * FWHM_TO_SIGMA * 1e-3


@dataclass(frozen=True)
class EventBatch:
    """Trigger-synchronized time tags; NaN marks a missing detection."""

    trigger: np.ndarray
    t1_ns: np.ndarray
    t2_ns: np.ndarray
    seed: int
    config_hash: str = ""

    def __post_init__(self):
        self.trigger.setflags(write=False)
        self.t1_ns.setflags(write=False)
        self.t2_ns.setflags(write=False)

    @property
    def n_triggers(self) -> int:
        return int(self.trigger.size)

    def coincidence_mask(self) -> np.ndarray:
        return ~(np.isnan(self.t1_ns) | np.isnan(self.t2_ns))

    def n_coincidences(self) -> int:
        return int(np.count_nonzero(self.coincidence_mask()))


def csi_cell_masses(csi_grid: CsiGrid) -> np.ndarray:
    """Per-sample probability masses: intensity x trapezoid weight x h^2."""
    n = csi_grid.grid.n
    h = csi_grid.grid.spacing
    return csi_grid.values * trapezoid_weights_2d(n, n) * h * h


def sample_pairs(csi_grid: CsiGrid, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. frequency pairs (nu1, nu2) from a CSI grid.

    Inverse-CDF sampling on the flattened grid masses plus uniform
    dithering within each cell (half a grid spacing around the sample
    point).  Deterministic for a given seed.
    """
    if n < 1:
        raise DomainError("need at least one sample")
    masses = csi_cell_masses(csi_grid).ravel()
    total = float(masses.sum())
    if total <= 0.0:
        raise DomainError("cannot sample from a zero-mass CSI")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(masses)
    cdf /= cdf[-1]
    u = rng.random(n)
    flat = np.searchsorted(cdf, u, side="right")
    flat = np.minimum(flat, masses.size - 1)
    ngrid = csi_grid.grid.n
    i, j = np.divmod(flat, ngrid)
    nu = csi_grid.grid.values()
    h = csi_grid.grid.spacing
    dither = rng.uniform(-0.5 * h, 0.5 * h, size=(n, 2))
    out = np.column_stack([nu[i], nu[j]]) + dither
    return out


def simulate_events(pairs: np.ndarray, map1: DispersionMap, map2: DispersionMap,
                    det1: DetectorSpec, det2: DetectorSpec,
                    trigger_period_ns: float, seed: int,
                    config_hash: str = "") -> EventBatch:
    """Detect sampled pairs: map to arrival times, jitter, drop, accidentals.

    Pair k occupies trigger slot k; times are relative to the slot's
    trigger.  Each photon is dropped independently with probability
    1 - efficiency.  Accidentals arrive uniformly within the gate at the
    configured mean rate per gate; when an accidental and a real photon
    share a gate the earlier click wins (a detector records its first
    click).
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DomainError("pairs must have shape (n, 2)")
    span = max(map1.span_ns, map2.span_ns)
    if trigger_period_ns <= span:
        raise DomainError(
            f"trigger period {trigger_period_ns:.3f} ns does not contain the "
            f"mapped time span {span:.3f} ns (wraparound)"
        )
    n = pairs.shape[0]
    rng = np.random.default_rng(seed)
    t1 = map1.time_at(pairs[:, 0])
    t2 = map2.time_at(pairs[:, 1])
    if det1.jitter_fwhm_ps > 0.0:
        t1 = t1 + rng.normal(0.0, det1.jitter_sigma_ns, n)
    if det2.jitter_fwhm_ps > 0.0:
        t2 = t2 + rng.normal(0.0, det2.jitter_sigma_ns, n)
    t1 = np.where(rng.random(n) < det1.efficiency, t1, np.nan)
    t2 = np.where(rng.random(n) < det2.efficiency, t2, np.nan)
    for det, t in ((det1, t1), (det2, t2)):
        if det.accidental_rate > 0.0:
            counts = rng.poisson(det.accidental_rate, n)
            hit = counts > 0
            acc_t = rng.uniform(0.0, trigger_period_ns, n)
            t_acc = np.where(hit, acc_t, np.nan)
            np.fmin(t, t_acc, out=t)
    return EventBatch(
        trigger=np.arange(n, dtype=np.int64),
        t1_ns=t1,
        t2_ns=t2,
        seed=seed,
        config_hash=config_hash,
    )


@dataclass(frozen=True)
class Histogram1D:
    """Uniform-bin counts; ``edges`` has len(counts) + 1 entries."""

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.edges.setflags(write=False)
        self.counts.setflags(write=False)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class Histogram2D:
    """Uniform 2D histogram over (nu1, nu2) with a dropped-sample counter."""

    edges1: np.ndarray
    edges2: np.ndarray
    counts: np.ndarray
    n_dropped: int = 0

    def __post_init__(self):
        self.edges1.setflags(write=False)
        self.edges2.setflags(write=False)
        self.counts.setflags(write=False)

    def total(self) -> int:
        return int(self.counts.sum())


def _aligned_edges(lo: float, hi: float, width: float) -> np.ndarray:
    """Bin edges of the given width aligned to multiples of the width."""
    first = math.floor(lo / width)
    last = math.ceil(hi / width)
    if last <= first:
        last = first + 1
    return (np.arange(first, last + 1)) * width


def toa_histogram(batch: EventBatch, bin_width_ps: float) -> Histogram1D:
    """Start-stop histogram of t2 - t1 over coincident records.

    Every coincidence lands in a bin (edges are grown to cover the data),
    so the histogram total equals the number of coincidences.
    """
    if bin_width_ps <= 0.0:
        raise DomainError("bin width must be > 0")
    mask = batch.coincidence_mask()
    d = (batch.t2_ns[mask] - batch.t1_ns[mask])
    w = bin_width_ps * 1e-3
    if d.size == 0:
        edges = np.asarray([0.0, w])
        return Histogram1D(edges=edges, counts=np.zeros(1, dtype=np.int64))
    edges = _aligned_edges(float(d.min()), float(d.max()) + 1e-12, w)
    counts, _ = np.histogram(d, bins=edges)
    return Histogram1D(edges=edges, counts=counts.astype(np.int64))


def arrival_histogram(batch: EventBatch, channel: int, bin_width_ps: float) -> Histogram1D:
    """Histogram of single-channel arrival times (detected clicks only)."""
    t = batch.t1_ns if channel == 1 else batch.t2_ns
    t = t[~np.isnan(t)]
    w = bin_width_ps * 1e-3
    if t.size == 0:
        edges = np.asarray([0.0, w])
        return Histogram1D(edges=edges, counts=np.zeros(1, dtype=np.int64))
    edges = _aligned_edges(float(t.min()), float(t.max()) + 1e-12, w)
    counts, _ = np.histogram(t, bins=edges)
    return Histogram1D(edges=edges, counts=counts.astype(np.int64))


def reconstruction_edges(grid: FreqGrid1D, stride: int) -> np.ndarray:
    """Frequency bin edges aligned with the CSI grid cells, coarsened.

    Every grid sample owns a cell of one grid spacing centered on it; the
    cells are grouped ``stride`` at a time (stride must divide n), placing
    bin boundaries halfway between grid samples so a sampled-and-dithered
    point stays in its source block.
    """
    if grid.n % stride != 0:
        raise DomainError("stride must divide the number of grid cells")
    h = grid.spacing
    nu = grid.values()
    inner = 0.5 * (nu[:-1] + nu[1:])
    edges = np.concatenate(([nu[0] - 0.5 * h], inner, [nu[-1] + 0.5 * h]))
    return edges[::stride] if stride > 1 else edges


def reconstruct_csi_histogram(batch: EventBatch, map1: DispersionMap,
                              map2: DispersionMap, grid: FreqGrid1D,
                              stride: int = 8) -> Histogram2D:
    """Invert arrival times to frequencies and bin the coincidences.

    Times whose inverted wavelength leaves the calibrated band are dropped
    and counted in ``n_dropped``; the histogram total plus the drops equals
    the number of coincidences.
    """
    mask = batch.coincidence_mask()
    t1 = batch.t1_ns[mask]
    t2 = batch.t2_ns[mask]
    ok = map1.in_band_times(t1) & map2.in_band_times(t2)
    nu1 = map1.freq_at(t1[ok])
    nu2 = map2.freq_at(t2[ok])
    edges = reconstruction_edges(grid, stride)
    counts, _, _ = np.histogram2d(nu1, nu2, bins=(edges, edges))
    inside = (
        (nu1 >= edges[0]) & (nu1 <= edges[-1])
        & (nu2 >= edges[0]) & (nu2 <= edges[-1])
    )
    dropped = int(t1.size - np.count_nonzero(inside))
    return Histogram2D(edges1=edges, edges2=edges,
                       counts=counts.astype(np.int64), n_dropped=dropped)


def bin_csi_reference(csi_grid: CsiGrid, stride: int = 8) -> np.ndarray:
    """Analytic CSI aggregated onto the reconstruction bins (unit mass).

    The bins group ``stride`` grid cells per axis (see
    :func:`reconstruction_edges`), so each sample's mass lands in the same
    block its dithered events fall into.
    """
    masses = csi_cell_masses(csi_grid)
    nb = csi_grid.grid.n // stride
    if nb * stride != csi_grid.grid.n:
        raise DomainError("stride must divide the number of grid cells")
    out = masses.reshape(nb, stride, nb, stride).sum(axis=(1, 3))
    total = out.sum()
    if total <= 0.0:
        raise DomainError("reference CSI has zero mass")
    return out / total


def relative_l2(observed: np.ndarray, reference: np.ndarray) -> float:
    """|| a/sum(a) - b/sum(b) ||_2 / || b/sum(b) ||_2."""
    a = np.asarray(observed, dtype=float)
    b = np.asarray(reference, dtype=float)
    if a.shape != b.shape:
        raise DomainError("histogram shapes differ")
    sa, sb = a.sum(), b.sum()
    if sa <= 0.0 or sb <= 0.0:
        raise DomainError("empty histogram in L2 comparison")
    diff = a / sa - b / sb
    return float(np.sqrt(np.sum(diff * diff) / np.sum((b / sb) ** 2)))


def analytic_toa_reference(csi_grid: CsiGrid, map1: DispersionMap,
                           map2: DispersionMap, edges_ns: np.ndarray) -> np.ndarray:
    """Quadrature prediction of the t2 - t1 histogram (unit mass)."""
    masses = csi_cell_masses(csi_grid)
    nu = csi_grid.grid.values()
    t1 = map1.time_at(nu)
    t2 = map2.time_at(nu)
    dt = t2[None, :] - t1[:, None]
    counts, _ = np.histogram(dt.ravel(), bins=edges_ns, weights=masses.ravel())
    total = counts.sum()
    if total <= 0.0:
        raise DomainError("reference ToA density has zero mass")
    return counts / total


def gaussian_blur(values: np.ndarray, sigma_bins: float) -> np.ndarray:
    """Discrete Gaussian convolution (same length, kernel truncated at 6 sigma)."""
    if sigma_bins <= 0.0:
        return np.asarray(values, dtype=float)
    half = max(1, int(math.ceil(6.0 * sigma_bins)))
    x = np.arange(-half, half + 1, dtype=float)
    kernel = np.exp(-0.5 * (x / sigma_bins) ** 2)
    kernel /= kernel.sum()
    return np.convolve(np.asarray(values, dtype=float), kernel, mode="same")


def threshold_full_width(positions: np.ndarray, values: np.ndarray,
                         frac: float = 0.05) -> float:
    """Full width of a signal at ``frac`` of its maximum (outermost crossings)."""
    y = np.asarray(values, dtype=float)
    x = np.asarray(positions, dtype=float)
    top = float(y.max())
    if top <= 0.0:
        raise DomainError("cannot measure the width of a non-positive signal")
    above = np.flatnonzero(y >= frac * top)
    if above.size < 2:
        raise DomainError("signal too narrow for a threshold width")
    return float(x[above[-1]] - x[above[0]])
