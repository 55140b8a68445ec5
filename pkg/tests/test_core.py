import math

import numpy as np
import pytest

from qcomb.core import (
    C_UM_PS,
    DomainError,
    FreqGrid1D,
    Grid2D,
    ResolutionError,
    delay_position_to_time,
    delay_time_to_position,
    diagonal_trapezoid_sums,
    fwhm_from_samples,
    integrate_1d,
    integrate_2d,
    frequency_to_wavelength,
    wavelength_to_frequency,
)


class TestConversions:
    def test_1584nm(self):
        # independent arithmetic with the exact speed of light
        assert wavelength_to_frequency(1584.0) == pytest.approx(
            299_792.458 / 1584.0, rel=1e-15)

    def test_half_wavelength_doubles_frequency(self):
        assert wavelength_to_frequency(792.0) == pytest.approx(
            2.0 * wavelength_to_frequency(1584.0), rel=1e-15)

    def test_c_definition(self):
        assert wavelength_to_frequency(299_792.458) == pytest.approx(1.0, abs=1e-15)

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            wavelength_to_frequency(0.0)
        with pytest.raises(DomainError):
            wavelength_to_frequency(-5.0)
        with pytest.raises(DomainError):
            frequency_to_wavelength(np.nan)

    def test_round_trip(self, rng):
        lam = rng.uniform(400.0, 2200.0, 100)
        back = frequency_to_wavelength(wavelength_to_frequency(lam))
        assert np.max(np.abs(back - lam) / lam) < 1e-12

    def test_array_in_array_out(self):
        nu = wavelength_to_frequency(np.array([792.0, 1584.0]))
        assert nu.shape == (2,)


class TestDelayConversion:
    def test_600um_is_2ps(self):
        tau = delay_position_to_time(600.0)
        assert tau == pytest.approx(600.0 / C_UM_PS, rel=1e-15)
        assert tau == pytest.approx(2.0, abs=2e-3)

    def test_zero(self):
        assert delay_position_to_time(0.0) == 0.0

    def test_dip_width_position(self):
        # 52.9 um of stage travel is 176.45 fs, a 176.3 fs dip width
        assert delay_position_to_time(52.9) * 1e3 == pytest.approx(176.3, abs=0.2)

    def test_negative_allowed_and_inverse(self):
        assert delay_position_to_time(-40.0) < 0.0
        assert delay_time_to_position(delay_position_to_time(123.4)) == pytest.approx(123.4)

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            delay_position_to_time(np.inf)


class TestGrids:
    def test_spacing_uniform(self):
        g = FreqGrid1D(center_thz=189.0, span_thz=9.56, n=1024)
        d = np.diff(g.values())
        # successive differences of ~189 THz doubles carry a few ulp of
        # rounding, which exceeds 1e-12 of the spacing at this scale
        bound = max(1e-12 * g.spacing, 4.0 * np.spacing(g.hi))
        assert np.max(np.abs(d - g.spacing)) < bound

    def test_covers_span(self):
        g = FreqGrid1D(center_thz=100.0, span_thz=10.0, n=11)
        v = g.values()
        assert v[0] == pytest.approx(95.0) and v[-1] == pytest.approx(105.0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            FreqGrid1D(center_thz=100.0, span_thz=1.0, n=1)
        with pytest.raises(DomainError):
            FreqGrid1D(center_thz=100.0, span_thz=-1.0, n=8)

    def test_grid2d_shape_check(self):
        g = FreqGrid1D(center_thz=100.0, span_thz=1.0, n=4)
        with pytest.raises(DomainError):
            Grid2D(axis1=g, axis2=g, values=np.zeros((4, 5)))


class TestIntegration:
    def test_constant(self):
        g = FreqGrid1D(center_thz=0.0, span_thz=2.0, n=33)
        assert integrate_1d(np.ones(33), g) == pytest.approx(2.0, rel=1e-15)

    def test_odd_function_vanishes(self):
        g = FreqGrid1D(center_thz=0.0, span_thz=4.0, n=257)
        x = g.values()
        assert abs(integrate_1d(x ** 3, g)) < 1e-12

    def test_gaussian_against_analytic(self):
        # oracle: closed-form integral of a normal density envelope
        sigma = 0.2
        g = FreqGrid1D(center_thz=0.0, span_thz=20.0 * sigma, n=801)
        x = g.values()
        got = integrate_1d(np.exp(-x * x / (2 * sigma * sigma)), g)
        assert got == pytest.approx(math.sqrt(2.0 * math.pi) * sigma, abs=1e-8)

    def test_linearity(self, rng):
        g = FreqGrid1D(center_thz=0.0, span_thz=3.0, n=101)
        f = rng.normal(size=101)
        h = rng.normal(size=101)
        a, b = 2.7, -1.3
        lhs = integrate_1d(a * f + b * h, g)
        rhs = a * integrate_1d(f, g) + b * integrate_1d(h, g)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_length_mismatch(self):
        g = FreqGrid1D(center_thz=0.0, span_thz=1.0, n=16)
        with pytest.raises(DomainError):
            integrate_1d(np.ones(15), g)

    def test_2d_separable(self):
        g = FreqGrid1D(center_thz=0.0, span_thz=2.0, n=41)
        x = g.values()
        vals = np.outer(x ** 2, np.ones(41))
        expect = integrate_1d(x ** 2, g) * 2.0
        assert integrate_2d(vals, g, g) == pytest.approx(expect, rel=1e-12)


class TestDiagonalSums:
    def test_matches_2d_quadrature(self, rng):
        # summing the per-diagonal line integrals recovers the 2D integral
        # for interior-supported matrices
        g = FreqGrid1D(center_thz=0.0, span_thz=4.0, n=64)
        x = g.values()
        m = np.exp(-np.add.outer(x ** 2, x ** 2))
        k = diagonal_trapezoid_sums(m, g.spacing)
        total = np.trapezoid(k, dx=g.spacing)
        assert total == pytest.approx(integrate_2d(m, g, g), rel=1e-9)

    def test_requires_square(self):
        with pytest.raises(DomainError):
            diagonal_trapezoid_sums(np.zeros((3, 4)), 0.1)


class TestFwhm:
    def test_gaussian(self):
        x = np.linspace(-5, 5, 2001)
        sigma = 0.7
        y = np.exp(-x * x / (2 * sigma * sigma))
        width, lo, hi, n = fwhm_from_samples(x, y)
        assert n == 2
        assert width == pytest.approx(2.3548 * sigma, rel=1e-4)
        assert lo == pytest.approx(-hi, abs=1e-9)

    def test_unresolved(self):
        with pytest.raises((DomainError, ResolutionError)):
            fwhm_from_samples(np.array([0.0, 1.0]), np.array([1.0, 1.0]))

    def test_multimodal_reports_widest(self):
        x = np.linspace(-10, 10, 4001)
        y = np.exp(-(x - 3) ** 2) + np.exp(-(x + 3) ** 2)
        width, lo, hi, n = fwhm_from_samples(x, y)
        assert n > 2
        assert width > 6.0
