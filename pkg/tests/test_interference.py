import math

import numpy as np
import pytest

from qcomb.core import (
    DomainError,
    FreqGrid1D,
    ResolutionError,
    integrate_2d,
    wavelength_to_frequency,
)
from qcomb.biphoton import JsaGrid
from qcomb.config import make_config, no_lpf_variant
from qcomb.interference import (
    coincidence_probability,
    comb_contrast,
    csi,
    dip_scan,
    double_slit_identity,
    extract_qudit,
    find_peaks,
    interference_amplitude,
    marginal_toa,
    tooth_separation_samples,
)

NU_P = wavelength_to_frequency(792.0)


def random_jsa(rng, n=96, complex_valued=False, nonnegative=True):
    grid = FreqGrid1D(center_thz=189.0, span_thz=6.0, n=n)
    if complex_valued:
        vals = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    elif nonnegative:
        vals = rng.uniform(0.0, 1.0, size=(n, n))
    else:
        vals = rng.normal(size=(n, n))
    mass = integrate_2d(np.abs(vals) ** 2, grid, grid)
    return JsaGrid(grid=grid, values=vals / math.sqrt(mass))


class TestInterferenceAmplitude:
    def test_symmetric_jsa_cancels_at_zero_delay(self, small_jsa):
        g = interference_amplitude(small_jsa, 0.0)
        assert float(np.abs(g).max()) == 0.0

    def test_diagonal_always_dark(self, rng):
        jsa = random_jsa(rng)
        for tau in (0.0, 0.37, 2.0):
            g = interference_amplitude(jsa, tau)
            assert np.abs(np.diagonal(g)).max() < 1e-14

    def test_magnitude_exchange_symmetric(self, rng):
        # |g(a, b)| = |g(b, a)| for any amplitude, checked by brute force
        for _ in range(5):
            jsa = random_jsa(rng, n=48, complex_valued=True)
            tau = rng.uniform(-3.0, 3.0)
            g = interference_amplitude(jsa, tau)
            asym = np.abs(np.abs(g) - np.abs(g).T).max()
            assert asym < 1e-12 * np.abs(g).max()


class TestCsi:
    def test_zero_delay_vanishes(self, small_jsa):
        grid_csi = csi(small_jsa, 0.0)
        assert float(grid_csi.values.max()) == 0.0
        assert grid_csi.total == 0.0

    def test_exchange_symmetry(self, default_jsa):
        grid_csi = csi(default_jsa, 1.07)
        asym = np.abs(grid_csi.values - grid_csi.values.T).max()
        assert asym <= 1e-9 * grid_csi.values.max()

    def test_diagonal_darkness(self, default_jsa):
        grid_csi = csi(default_jsa, 2.0)
        diag = np.abs(np.diagonal(grid_csi.values)).max()
        assert diag <= 1e-12 * grid_csi.values.max()

    def test_matches_general_route(self, small_jsa):
        for tau in (0.13, 0.53, 2.0):
            grid_csi = csi(small_jsa, tau)
            g = interference_amplitude(small_jsa, tau)
            general = (g * g.conj()).real
            assert np.abs(grid_csi.values - general).max() <= 1e-12 * general.max()

    def test_complex_input_uses_general_route(self, rng):
        jsa = random_jsa(rng, complex_valued=True)
        grid_csi = csi(jsa, 0.5)
        assert grid_csi.general_route
        assert np.all(grid_csi.values >= 0.0)

    def test_teeth_at_antiphase_positions(self, default_jsa):
        # maxima where cos(2 pi dnu tau) = -1: dnu = (2j - 1) / (2 tau)
        tau = 1.07
        toa = marginal_toa(csi(default_jsa, tau))
        pos = toa.peaks.positions
        inner = pos[np.abs(pos) < 2.0]  # envelope plateau
        expected = np.array([(2 * j - 1) / (2 * tau) * s
                             for j in (1, 2) for s in (-1, 1)])
        for p in inner:
            assert np.min(np.abs(expected - p)) < 2 * default_jsa.grid.spacing

    def test_tooth_spacing_is_inverse_delay(self, default_jsa):
        h = default_jsa.grid.spacing
        for tau in (0.53, 1.07, 2.0):
            toa = marginal_toa(csi(default_jsa, tau))
            assert abs(toa.tooth_spacing() - 1.0 / tau) < 2 * h

    def test_counts_at_stage_positions(self, default_jsa):
        # the same comb progression expressed as delay-stage travel
        from qcomb.core import delay_position_to_time

        for d_um, expected in ((40.0, 2), (160.0, 4), (320.0, 8), (600.0, 14)):
            tau = delay_position_to_time(d_um)
            toa = marginal_toa(csi(default_jsa, tau))
            assert toa.peaks.count == expected, f"{d_um} um"

    def test_width_factor_of_difference_marginal(self, default_jsa):
        # anti-correlation doubles widths: the 5%-threshold span of H is
        # twice that of the single-axis intensity marginal
        from qcomb.spectrometer import threshold_full_width

        nu = default_jsa.grid.values()
        for tau in (0.53, 1.07, 2.0):
            grid_csi = csi(default_jsa, tau)
            toa = marginal_toa(grid_csi)
            w_h = threshold_full_width(toa.dnu_thz, toa.values, 0.05)
            w_m = threshold_full_width(nu, grid_csi.values.sum(axis=1), 0.05)
            assert w_h / w_m == pytest.approx(2.0, rel=0.10)


class TestCoincidenceProbability:
    def test_perfect_dip_at_zero(self, default_jsa):
        assert coincidence_probability(default_jsa, 0.0) < 1e-9

    def test_large_delay_baseline(self, default_jsa):
        assert coincidence_probability(default_jsa, 4.0) == pytest.approx(0.5, abs=0.005)
        assert coincidence_probability(default_jsa, 6.0) == pytest.approx(0.5, abs=0.005)

    def test_bounds(self, default_jsa):
        for tau in np.linspace(-1.0, 1.0, 21):
            p = coincidence_probability(default_jsa, float(tau))
            assert 0.0 <= p <= 1.0

    def test_smooth_envelope_never_exceeds_half(self):
        # with the purely Gaussian (no long-pass) arms the cosine transform
        # of the envelope stays positive, so P <= 1/2 up to quadrature error
        # (the grid truncates the Gaussian tail near the 1e-5 level, which
        # rings at a few 1e-7 in P)
        jsa = no_lpf_variant().jsa()
        for tau in np.linspace(0.0, 1.0, 11):
            assert coincidence_probability(jsa, float(tau)) <= 0.5 + 1e-5

    def test_default_envelope_overshoots_half(self, default_jsa):
        # trimmed band edges ring: the coincidence probability passes 0.5
        # just outside the dip (two-photon antibunching overshoot)
        taus = np.linspace(0.15, 0.5, 36)
        ps = [coincidence_probability(default_jsa, float(t)) for t in taus]
        assert max(ps) > 0.5

    def test_minimum_at_zero_delay(self, default_jsa):
        taus = np.linspace(-0.3, 0.3, 31)
        ps = [coincidence_probability(default_jsa, float(t)) for t in taus]
        assert int(np.argmin(ps)) == 15


class TestDipScan:
    def test_ideal_visibility(self, default_jsa):
        scan = dip_scan(default_jsa, -1.0, 1.0, 201)
        assert scan.metrics.visibility == pytest.approx(1.0, abs=1e-3)
        assert scan.metrics.p_min < 1e-9
        assert scan.metrics.tau_min_ps == pytest.approx(0.0, abs=scan.tau_ps[1] - scan.tau_ps[0])

    def test_width_against_reference(self, default_jsa):
        scan = dip_scan(default_jsa, -1.0, 1.0, 201)
        assert scan.metrics.fwhm_fs == pytest.approx(176.3, rel=0.25)
        assert scan.metrics.fwhm_um == pytest.approx(52.9, rel=0.25)

    def test_asymmetric_filters_reduce_visibility(self):
        cfg = make_config({"grid": {"n": 512}, "filters": {"idler_shift_nm": 5.0}})
        scan = dip_scan(cfg.jsa(), -1.0, 1.0, 101)
        assert scan.metrics.visibility < 1.0
        assert scan.metrics.p_min > 1e-9

    def test_accidental_floor_degrades_visibility(self, small_jsa):
        clean = dip_scan(small_jsa, -1.0, 1.0, 101)
        floored = dip_scan(small_jsa, -1.0, 1.0, 101, accidental_floor=0.05)
        assert floored.metrics.visibility < clean.metrics.visibility
        assert clean.metrics.visibility == pytest.approx(1.0, abs=1e-3)

    def test_unresolved_narrow_range(self, small_jsa):
        with pytest.raises(ResolutionError):
            dip_scan(small_jsa, -0.01, 0.01, 51)

    def test_minimum_near_edge_rejected(self, small_jsa):
        with pytest.raises(ResolutionError):
            dip_scan(small_jsa, -0.002, 1.0, 51)

    def test_p_in_unit_interval(self, default_jsa):
        scan = dip_scan(default_jsa, -1.0, 1.0, 201)
        assert np.all(scan.p >= 0.0) and np.all(scan.p <= 1.0)


class TestFindPeaks:
    def test_single_gaussian(self):
        x = np.linspace(-5, 5, 501)
        y = np.exp(-x * x)
        peaks = find_peaks(y, 0.05, 3, positions=x)
        assert peaks.count == 1
        assert peaks.positions[0] == pytest.approx(0.0, abs=0.03)
        assert peaks.indices[0] == 250

    def test_two_gaussians(self):
        x = np.linspace(-10, 10, 2001)
        y = np.exp(-(x - 5) ** 2 * 2) + np.exp(-(x + 5) ** 2 * 2)
        peaks = find_peaks(y, 0.05, 5, positions=x)
        assert peaks.count == 2

    def test_threshold_validation(self):
        with pytest.raises(DomainError):
            find_peaks(np.ones(10), 0.0, 3)
        with pytest.raises(DomainError):
            find_peaks(np.ones(10), 1.5, 3)
        with pytest.raises(DomainError):
            find_peaks(np.ones(10), 0.1, 1)

    def test_all_zero_gives_empty(self):
        peaks = find_peaks(np.zeros(64), 0.05, 3)
        assert peaks.count == 0

    def test_tie_breaks_to_lower_index(self):
        y = np.zeros(21)
        y[8] = 1.0
        y[12] = 1.0  # equal heights within the suppression window
        peaks = find_peaks(y, 0.05, 6)
        assert peaks.count == 1
        assert peaks.indices[0] == 8

    def test_prominence_filters_ripple(self, rng):
        x = np.linspace(-4, 4, 801)
        envelope = np.exp(-x * x / 4)
        noisy = envelope * (1.0 + 0.02 * rng.standard_normal(801))
        plain = find_peaks(noisy, 0.05, 2)
        strict = find_peaks(noisy, 0.05, 2, min_prominence_frac=0.2)
        assert plain.count > strict.count
        assert strict.count <= 1

    def test_positions_strictly_increasing(self, default_jsa):
        toa = marginal_toa(csi(default_jsa, 2.0))
        assert np.all(np.diff(toa.peaks.positions) > 0)


class TestMarginalToa:
    def test_even_in_dnu(self, default_jsa):
        toa = marginal_toa(csi(default_jsa, 0.53))
        asym = np.abs(toa.values - toa.values[::-1]).max()
        assert asym <= 1e-9 * toa.values.max()

    def test_dark_at_zero_difference(self, default_jsa):
        toa = marginal_toa(csi(default_jsa, 1.07))
        mid = (len(toa.values) - 1) // 2
        assert toa.values[mid] <= 1e-12 * toa.values.max()

    def test_peak_counts(self, default_jsa):
        expected = {0.13: 2, 0.53: 4, 1.07: 8, 2.0: 14}
        for tau, count in expected.items():
            toa = marginal_toa(csi(default_jsa, tau))
            assert toa.peaks.count == count, f"tau={tau}"

    def test_no_comb_flag_at_zero_delay(self, default_jsa):
        toa = marginal_toa(csi(default_jsa, 0.0))
        assert toa.no_comb

    def test_parseval(self, default_jsa):
        for tau in (0.13, 1.07, 7.03):
            grid_csi = csi(default_jsa, tau)
            toa = marginal_toa(grid_csi)
            p = coincidence_probability(default_jsa, tau)
            assert toa.integral() == pytest.approx(4.0 * p, rel=1e-9)
            assert grid_csi.total == pytest.approx(4.0 * p, rel=1e-9)

    def test_separation_helper(self):
        assert tooth_separation_samples(0.0, 0.01) == 2
        assert tooth_separation_samples(2.0, 0.009343) == max(2, round(1 / (4 * 0.009343)))


class TestExtractQudit:
    def test_dimension_above_ten(self, default_jsa):
        q = extract_qudit(csi(default_jsa, 2.0), NU_P)
        assert q.dimension(min_weight=0.05) >= 10

    def test_weights_normalized(self, default_jsa):
        q = extract_qudit(csi(default_jsa, 2.0), NU_P)
        assert float(np.sum(q.weights() ** 2)) == pytest.approx(1.0, rel=1e-12)

    def test_basis_centers_on_ridge(self, default_jsa):
        h = default_jsa.grid.spacing
        q = extract_qudit(csi(default_jsa, 2.0), NU_P)
        for t in q.teeth:
            assert abs(t.nu_plus_thz + t.nu_minus_thz - NU_P) < h

    def test_plateau_centroids_on_ridge(self, default_jsa):
        # away from the filter edges the measured centroids also sum to the
        # pump frequency; edge teeth slide along the ridge (documented)
        h = default_jsa.grid.spacing
        q = extract_qudit(csi(default_jsa, 2.0), NU_P)
        for t in q.teeth:
            if abs(t.dnu_thz) < 2.0:
                assert abs(t.measured_nu1_thz + t.measured_nu2_thz - NU_P) < h

    def test_weight_symmetry(self, default_jsa):
        q = extract_qudit(csi(default_jsa, 1.07), NU_P)
        by_j = {t.j: t.weight for t in q.teeth}
        for j in range(1, 5):
            assert by_j[j] == pytest.approx(by_j[-j], rel=0.02)

    def test_teeth_ordered(self, default_jsa):
        q = extract_qudit(csi(default_jsa, 2.0), NU_P)
        dnu = [t.dnu_thz for t in q.teeth]
        assert dnu == sorted(dnu)

    def test_unresolved_teeth_error(self, small_jsa):
        with pytest.raises(ResolutionError):
            extract_qudit(csi(small_jsa, 7.03), NU_P)

    def test_zero_delay_error(self, small_jsa):
        with pytest.raises(DomainError):
            extract_qudit(csi(small_jsa, 0.0), NU_P)


class TestDoubleSlitIdentity:
    def test_random_grids(self, rng):
        for _ in range(20):
            jsa = random_jsa(rng, n=64)
            tau = float(rng.uniform(0.1, 7.0))
            residual = double_slit_identity(jsa, tau)
            peak = csi(jsa, tau).values.max()
            assert residual < 1e-10 * peak

    def test_physical_jsa(self, default_jsa):
        for tau in (0.13, 0.53, 1.07, 2.0, 7.03):
            residual = double_slit_identity(default_jsa, tau)
            peak = csi(default_jsa, tau).values.max()
            assert residual < 1e-10 * peak

    def test_symmetric_reduces_to_fringe_law(self, small_jsa):
        # I1 = I2 pointwise: I = 2 I1 (1 - cos(2 pi dnu tau)) exactly
        tau = 0.53
        f = small_jsa.values
        nu = small_jsa.grid.values()
        dnu = nu[:, None] - nu[None, :]
        fringe = 2.0 * f * f * (1.0 - np.cos(2 * np.pi * dnu * tau))
        grid_csi = csi(small_jsa, tau)
        assert np.abs(grid_csi.values - fringe).max() <= 1e-12 * fringe.max()

    def test_complex_rejected(self, rng):
        jsa = random_jsa(rng, complex_valued=True)
        with pytest.raises(DomainError):
            double_slit_identity(jsa, 0.5)

    def test_sign_mixed_rejected(self, rng):
        jsa = random_jsa(rng, nonnegative=False)
        with pytest.raises(DomainError):
            double_slit_identity(jsa, 0.5)


class TestCombContrast:
    def test_full_contrast_comb(self):
        x = np.arange(400)
        y = (1.0 - np.cos(2 * np.pi * x / 40)) * np.exp(-((x - 200) / 150) ** 2)
        assert comb_contrast(y, 40.0) > 0.9

    def test_smooth_envelope_scores_zero(self):
        x = np.arange(400)
        y = np.exp(-((x - 200) / 80) ** 2)
        assert comb_contrast(y, 40.0) == 0.0
