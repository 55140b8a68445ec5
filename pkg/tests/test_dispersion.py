import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from qcomb.core import DomainError, SolverError, wavelength_to_frequency
from qcomb.dispersion import (
    CrystalSpec,
    TaylorDispersion,
    group_velocity_mismatch,
    inv_group_velocity,
    load_sellmeier_file,
    phase_mismatch,
    poling_period_closed_form,
    refractive_index,
    shipped_ppslt_model,
    solve_poling_period,
)

GOLDEN = json.loads((Path(__file__).parent / "data" / "sellmeier_golden.json").read_text())

NU0 = wavelength_to_frequency(1584.0)


def taylor_backend(**kw):
    args = dict(nu0_thz=NU0, inv_vg_pump=7.4547, inv_vg_signal=7.2134,
                inv_vg_idler=7.2134, base_mismatch_per_mm=2 * math.pi / 21.5e-3)
    args.update(kw)
    return TaylorDispersion(**args)


def taylor_crystal(**kw):
    return CrystalSpec(length_mm=40.0, poling_period_um=21.5,
                       dispersion=taylor_backend(**kw))


class TestSellmeierIndex:
    def test_against_independent_formula(self):
        # oracle: evaluate the documented closed form with plain math on the
        # coefficients read straight from the shipped data file
        model = shipped_ppslt_model()
        coeffs = {}
        text = (Path(__file__).parents[1] / "src" / "qcomb" / "data"
                / "ppslt_sellmeier.txt").read_text()
        for line in text.splitlines():
            tok = line.split("#")[0].split()
            if tok and tok[0] == "axis":
                coeffs[tok[1]] = [float(v) for v in tok[2:]]
        lam_nm = 1350.0  # mid-range
        for axis in ("o", "e"):
            a, b, c, d, _ = coeffs[axis]
            l2 = (lam_nm * 1e-3) ** 2
            expected = math.sqrt(a + b / (l2 - c) + d * l2)
            assert refractive_index(model, lam_nm, axis) == pytest.approx(
                expected, rel=1e-12)

    def test_physical_range(self):
        model = shipped_ppslt_model()
        lam = np.linspace(520.0, 2100.0, 64)
        for axis in ("o", "e"):
            n = model.index(lam, axis)
            assert np.all(n > 1.0) and np.all(np.isfinite(n))

    def test_out_of_range_rejected(self):
        model = shipped_ppslt_model()
        with pytest.raises(DomainError):
            refractive_index(model, 300.0, "o")
        with pytest.raises(DomainError):
            refractive_index(model, 2500.0, "e")

    def test_unknown_axis(self):
        with pytest.raises(DomainError):
            refractive_index(shipped_ppslt_model(), 1584.0, "z")

    def test_reference_temperature_is_neutral(self):
        model = shipped_ppslt_model()
        n_ref = model.index(1584.0, "o")
        warmed = model.at_temperature(model.reference_temperature_c)
        assert warmed.index(1584.0, "o") == n_ref

    def test_linear_temperature_shift(self):
        model = shipped_ppslt_model()
        dndt = model.axes["o"].dndt_per_k
        shifted = model.at_temperature(model.reference_temperature_c + 10.0)
        assert shifted.index(1584.0, "o") - model.index(1584.0, "o") == pytest.approx(
            10.0 * dndt, rel=1e-9)


class TestGroupVelocity:
    def test_taylor_at_degeneracy_is_exact(self):
        t = taylor_backend()
        assert inv_group_velocity(t, 1584.0, "signal") == t.inv_vg_signal
        assert inv_group_velocity(t, 1584.0, "pump") == t.inv_vg_pump

    def test_fd_matches_analytic_on_quadratic_model(self):
        # polynomial oracle: the Taylor backend's k is quadratic in nu, so
        # its analytic derivative must match a central finite difference of
        # the same polynomial evaluated in the test
        t = taylor_backend(beta2_signal=0.05)
        nu = wavelength_to_frequency(1570.0)
        dnu = 1e-3

        def k_signal(nu_thz):
            x = 2 * math.pi * (nu_thz - t.nu0_thz)
            return t.inv_vg_signal * x + 0.5 * t.beta2_signal * x * x

        fd = (k_signal(nu + dnu) - k_signal(nu - dnu)) / (2 * dnu * 2 * math.pi)
        analytic = inv_group_velocity(t, 1570.0, "signal")
        assert analytic == pytest.approx(fd, rel=1e-6)

    def test_gvm_golden_record(self):
        model = shipped_ppslt_model()
        vs = inv_group_velocity(model, 1584.0, model.signal_axis)
        vi = inv_group_velocity(model, 1584.0, model.idler_axis)
        assert vs == pytest.approx(GOLDEN["inv_vg_signal"], rel=1e-9)
        assert vi == pytest.approx(GOLDEN["inv_vg_idler"], rel=1e-9)
        gvm = group_velocity_mismatch(model, 1584.0)
        assert gvm == pytest.approx(GOLDEN["gvm_abs_ps_per_mm"], abs=1e-9)
        assert gvm < 0.02  # the shipped set is group-velocity matched

    def test_fd_needs_room_inside_range(self):
        model = shipped_ppslt_model()
        with pytest.raises(DomainError):
            inv_group_velocity(model, model.range_nm[1], "o")


class TestPhaseMismatch:
    def test_zero_at_designed_degeneracy(self):
        crystal = taylor_crystal()
        assert abs(phase_mismatch(crystal, NU0, NU0)) < 1e-9

    def test_gvm_sum_dependence(self):
        crystal = taylor_crystal()
        a = phase_mismatch(crystal, NU0 + 0.7, NU0 - 0.2)
        b = phase_mismatch(crystal, NU0 + 0.3, NU0 + 0.2)
        assert a == pytest.approx(b, abs=1e-12)

    def test_antidiagonal_is_dark(self):
        crystal = taylor_crystal()
        delta = np.linspace(-3.0, 3.0, 101)
        dk = phase_mismatch(crystal, NU0 + delta, NU0 - delta)
        assert np.max(np.abs(dk)) < 1e-12

    def test_swap_signal_idler_transposes(self):
        t = taylor_backend(inv_vg_idler=7.30)
        crystal = CrystalSpec(length_mm=40.0, poling_period_um=21.5, dispersion=t)
        swapped = CrystalSpec(length_mm=40.0, poling_period_um=21.5,
                              dispersion=t.swap_signal_idler())
        a = phase_mismatch(crystal, NU0 + 0.4, NU0 - 0.9)
        b = phase_mismatch(swapped, NU0 - 0.9, NU0 + 0.4)
        assert a == pytest.approx(b, rel=1e-12)

    def test_swap_sellmeier_axes(self):
        model = shipped_ppslt_model()
        swapped = replace(model, signal_axis=model.idler_axis,
                          idler_axis=model.signal_axis)
        c1 = CrystalSpec(length_mm=40.0, poling_period_um=21.5, dispersion=model)
        c2 = CrystalSpec(length_mm=40.0, poling_period_um=21.5, dispersion=swapped)
        a = phase_mismatch(c1, NU0 + 0.4, NU0 - 0.9)
        b = phase_mismatch(c2, NU0 - 0.9, NU0 + 0.4)
        assert a == pytest.approx(b, rel=1e-12)

    def test_finite_on_default_band(self):
        model = shipped_ppslt_model()
        crystal = CrystalSpec(length_mm=40.0, poling_period_um=21.5,
                              dispersion=model)
        nu = np.linspace(NU0 - 4.8, NU0 + 4.8, 41)
        dk = phase_mismatch(crystal, nu[:, None], nu[None, :])
        assert np.all(np.isfinite(dk))


class TestPolingDesign:
    def test_shipped_set_reproduces_design(self):
        period = solve_poling_period(shipped_ppslt_model(), 792.0, 1584.0)
        assert period == pytest.approx(21.5, abs=1.0)
        assert period == pytest.approx(GOLDEN["poling_period_um"], abs=1e-6)

    def test_solution_zeroes_the_mismatch(self):
        model = shipped_ppslt_model()
        period = solve_poling_period(model, 792.0, 1584.0)
        crystal = CrystalSpec(length_mm=40.0, poling_period_um=period,
                              dispersion=model)
        assert abs(phase_mismatch(crystal, NU0, NU0)) < 1e-9

    def test_taylor_matches_closed_form(self):
        t = taylor_backend()
        period = solve_poling_period(t, 792.0, 1584.0)
        assert period == pytest.approx(poling_period_closed_form(t, 1584.0),
                                       abs=1e-10)
        assert period == pytest.approx(21.5, abs=1e-10)

    def test_no_bracket_raises(self):
        t = taylor_backend()
        with pytest.raises(SolverError):
            solve_poling_period(t, 792.0, 1584.0, bracket_um=(100.0, 200.0))

    def test_degeneracy_precondition(self):
        with pytest.raises(DomainError):
            solve_poling_period(taylor_backend(), 792.0, 1600.0)


class TestDataFile:
    def test_loader_round_trip(self, tmp_path):
        src = (Path(__file__).parents[1] / "src" / "qcomb" / "data"
               / "ppslt_sellmeier.txt")
        model = load_sellmeier_file(src)
        assert model.pump_axis == "e"
        assert model.signal_axis == "o"
        assert model.range_nm == (500.0, 2200.0)

    def test_loader_rejects_garbage(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("material x\nnonsense 1 2 3\n")
        with pytest.raises(DomainError):
            load_sellmeier_file(bad)

    def test_loader_requires_range(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("material x\naxis o 4.5 0.08 0.03 -0.02\n")
        with pytest.raises(DomainError):
            load_sellmeier_file(bad)
