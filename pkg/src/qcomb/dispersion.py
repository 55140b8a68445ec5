"""Refractive index models, quasi-phase-matching, and poling-period design.

Two interchangeable dispersion backends drive the phase-matching function:

* :class:`SellmeierModel` - a conventional single-pole Sellmeier form per
  polarization axis, n^2 = A + B / (L^2 - C) + D * L^2 with L the vacuum
  wavelength in um, plus an optional linear thermo-optic term
  dn/dT * (T - Tref).  Coefficient sets are loaded from a plain-text data
  file (see :func:`load_sellmeier_file` for the schema).  The set shipped
  with the package is an approximate, artifact-calibrated description of a
  periodically poled MgO-doped stoichiometric LiTaO3 crystal; see the
  package README for the provenance note.

* :class:`TaylorDispersion` - a local expansion of the wave vectors around
  the degenerate frequency nu0, parameterized directly by the inverse group
  velocities (ps/mm) and optional second-order coefficients (ps^2/mm).
  With equal signal/idler inverse group velocities it realizes exact
  group-velocity matching: the phase mismatch depends on nu_s + nu_i only,
  so its zero set is exactly the anti-diagonal nu_s + nu_i = 2 nu0.

Phase mismatch convention (rad/mm), type-II collinear quasi-phase-matching:

    dk = k_p(nu_s + nu_i) - k_s(nu_s) - k_i(nu_i) - 2 pi / poling_period
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .core import (
    C_MM_PS,
    C_NM_THZ,
    DomainError,
    SolverError,
    wavelength_to_frequency,
)

#: Finite-difference step (THz) for numeric group-velocity evaluation.
FD_STEP_THZ = 1e-3

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SellmeierAxis:
    """Coefficients for one polarization axis: n^2 = A + B/(L^2 - C) + D L^2."""

    a: float
    b: float
    c: float
    d: float
    dndt_per_k: float = 0.0


@dataclass(frozen=True)
class SellmeierModel:
    """Named coefficient sets per axis with a shared validity range.

    ``temperature_c`` is the operating temperature; the correction
    ``dndt_per_k * (T - reference_temperature_c)`` is added to n.
    ``pump_axis`` / ``signal_axis`` / ``idler_axis`` record which axis each
    wave propagates on (type-II: signal and idler orthogonal).
    """

    name: str
    axes: dict
    range_nm: tuple
    reference_temperature_c: float = 40.8
    temperature_c: float = 40.8
    pump_axis: str = "e"
    signal_axis: str = "o"
    idler_axis: str = "e"

    def at_temperature(self, temperature_c: float) -> "SellmeierModel":
        return replace(self, temperature_c=temperature_c)

    def check_range(self, lambda_nm, margin_nm: float = 0.0):
        lam = np.asarray(lambda_nm, dtype=float)
        lo, hi = self.range_nm
        if np.any(lam < lo + margin_nm) or np.any(lam > hi - margin_nm):
            raise DomainError(
                f"wavelength outside the valid range {lo}-{hi} nm of "
                f"Sellmeier set '{self.name}'"
            )

    def index(self, lambda_nm, axis: str):
        """n(lambda, T) with the linear temperature correction applied."""
        if axis not in self.axes:
            raise DomainError(f"unknown axis '{axis}' (have {sorted(self.axes)})")
        self.check_range(lambda_nm)
        cf = self.axes[axis]
        lam_um = np.asarray(lambda_nm, dtype=float) * 1e-3
        l2 = lam_um * lam_um
        n2 = cf.a + cf.b / (l2 - cf.c) + cf.d * l2
        if np.any(n2 <= 1.0):
            raise DomainError("Sellmeier evaluation left the physical range n > 1")
        n = np.sqrt(n2) + cf.dndt_per_k * (self.temperature_c - self.reference_temperature_c)
        return float(n) if np.ndim(lambda_nm) == 0 else n

    def wavevector(self, nu_thz, axis: str):
        """k(nu) = 2 pi n nu / c in rad/mm."""
        lam = C_NM_THZ / np.asarray(nu_thz, dtype=float)
        n = self.index(lam, axis)
        return _TWO_PI * n * np.asarray(nu_thz, dtype=float) / C_MM_PS


@dataclass(frozen=True)
class TaylorDispersion:
    """Wave vectors expanded to second order around the degenerate point.

    ``base_mismatch_per_mm`` is k_p - k_s - k_i evaluated at degeneracy
    (rad/mm); together with the crystal's poling period it fixes the
    quasi-phase-matching offset, and makes the poling-period design problem
    well posed for this backend (closed form: period = 2 pi / base).
    """

    nu0_thz: float
    inv_vg_pump: float
    inv_vg_signal: float
    inv_vg_idler: float
    beta2_pump: float = 0.0
    beta2_signal: float = 0.0
    beta2_idler: float = 0.0
    base_mismatch_per_mm: float = _TWO_PI / (21.5e-3)

    def __post_init__(self):
        for v in (self.inv_vg_pump, self.inv_vg_signal, self.inv_vg_idler):
            if not (v > 0.0):
                raise DomainError("inverse group velocities must be > 0 ps/mm")

    @property
    def is_group_velocity_matched(self) -> bool:
        return self.inv_vg_signal == self.inv_vg_idler

    def swap_signal_idler(self) -> "TaylorDispersion":
        return replace(
            self,
            inv_vg_signal=self.inv_vg_idler,
            inv_vg_idler=self.inv_vg_signal,
            beta2_signal=self.beta2_idler,
            beta2_idler=self.beta2_signal,
        )


@dataclass(frozen=True)
class CrystalSpec:
    """Poled crystal: length (mm), poling period (um), dispersion backend."""

    length_mm: float
    poling_period_um: float
    dispersion: object

    def __post_init__(self):
        if not (self.length_mm > 0.0):
            raise DomainError("crystal length must be > 0 mm")
        if not (self.poling_period_um > 0.0):
            raise DomainError("poling period must be > 0 um")


def refractive_index(model: SellmeierModel, lambda_nm, axis: str):
    """n(lambda, T) for one axis; rejects out-of-range wavelengths."""
    return model.index(lambda_nm, axis)


def inv_group_velocity(model, lambda_nm, axis: str = "o") -> float:
    """Inverse group velocity dk/domega in ps/mm.

    Taylor backends evaluate their analytic derivative; Sellmeier models use
    a central finite difference in frequency with step ``FD_STEP_THZ``.
    """
    if isinstance(model, TaylorDispersion):
        nu = wavelength_to_frequency(lambda_nm)
        dnu = nu - model.nu0_thz
        if axis in ("p", "pump"):
            return model.inv_vg_pump + model.beta2_pump * _TWO_PI * dnu
        if axis in ("s", "signal"):
            return model.inv_vg_signal + model.beta2_signal * _TWO_PI * dnu
        if axis in ("i", "idler"):
            return model.inv_vg_idler + model.beta2_idler * _TWO_PI * dnu
        raise DomainError(f"unknown Taylor axis '{axis}'")
    nu = wavelength_to_frequency(lambda_nm)
    model.check_range(lambda_nm)
    # Both FD evaluation points must also stay inside the valid range.
    lam_lo = C_NM_THZ / (nu + FD_STEP_THZ)
    lam_hi = C_NM_THZ / (nu - FD_STEP_THZ)
    model.check_range([lam_lo, lam_hi])
    k_hi = model.wavevector(nu + FD_STEP_THZ, axis)
    k_lo = model.wavevector(nu - FD_STEP_THZ, axis)
    return float((k_hi - k_lo) / (2.0 * FD_STEP_THZ * _TWO_PI))


def group_velocity_mismatch(model, lambda_nm) -> float:
    """|V_s^-1 - V_i^-1| between the signal and idler waves (ps/mm)."""
    if isinstance(model, TaylorDispersion):
        return abs(model.inv_vg_signal - model.inv_vg_idler)
    vs = inv_group_velocity(model, lambda_nm, model.signal_axis)
    vi = inv_group_velocity(model, lambda_nm, model.idler_axis)
    return abs(vs - vi)


def _collinear_mismatch(model, nu_s, nu_i):
    """k_p(nu_s + nu_i) - k_s(nu_s) - k_i(nu_i) in rad/mm, before QPM."""
    if isinstance(model, TaylorDispersion):
        ds = np.asarray(nu_s, dtype=float) - model.nu0_thz
        di = np.asarray(nu_i, dtype=float) - model.nu0_thz
        first = _TWO_PI * (
            (model.inv_vg_pump - model.inv_vg_signal) * ds
            + (model.inv_vg_pump - model.inv_vg_idler) * di
        )
        second = 0.5 * _TWO_PI ** 2 * (
            model.beta2_pump * (ds + di) ** 2
            - model.beta2_signal * ds ** 2
            - model.beta2_idler * di ** 2
        )
        return model.base_mismatch_per_mm + first + second
    nu_s = np.asarray(nu_s, dtype=float)
    nu_i = np.asarray(nu_i, dtype=float)
    model.check_range(C_NM_THZ / nu_s)
    model.check_range(C_NM_THZ / nu_i)
    model.check_range(C_NM_THZ / (nu_s + nu_i))
    kp = model.wavevector(nu_s + nu_i, model.pump_axis)
    ks = model.wavevector(nu_s, model.signal_axis)
    ki = model.wavevector(nu_i, model.idler_axis)
    return kp - ks - ki


def phase_mismatch(crystal: CrystalSpec, nu_s, nu_i):
    """Quasi-phase-matched mismatch dk (rad/mm); accepts scalars or arrays."""
    qpm = _TWO_PI / (crystal.poling_period_um * 1e-3)
    dk = _collinear_mismatch(crystal.dispersion, nu_s, nu_i) - qpm
    if isinstance(crystal.dispersion, TaylorDispersion):
        # The Taylor base mismatch already sits at the designed QPM point.
        pass
    return dk if np.ndim(dk) else float(dk)


def solve_poling_period(model, pump_lambda_nm: float, degenerate_lambda_nm: float,
                        bracket_um=(1.0, 500.0)) -> float:
    """Poling period (um) that phase-matches degenerate collinear operation.

    Solves dk(period) = 0 at nu_s = nu_i = c / degenerate_lambda by bisection
    on the bracketed monotone function dk(period) = K - 2 pi / period.
    """
    if abs(degenerate_lambda_nm - 2.0 * pump_lambda_nm) > 1e-3 * degenerate_lambda_nm:
        raise DomainError("degenerate wavelength must be 2x the pump wavelength (0.1%)")
    nu0 = wavelength_to_frequency(degenerate_lambda_nm)
    k_residual = float(_collinear_mismatch(model, nu0, nu0))

    def g(period_um):
        return k_residual - _TWO_PI / (period_um * 1e-3)

    lo, hi = bracket_um
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo * g_hi > 0.0:
        raise SolverError(
            f"no sign change for the poling period in [{lo}, {hi}] um "
            f"(g({lo}) = {g_lo:.3g}, g({hi}) = {g_hi:.3g})"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if g_lo * g_mid < 0.0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
        if hi - lo < 1e-13 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def poling_period_closed_form(model, degenerate_lambda_nm: float) -> float:
    """Analytic period 2 pi / K for backends with a known residual K."""
    nu0 = wavelength_to_frequency(degenerate_lambda_nm)
    k_residual = float(_collinear_mismatch(model, nu0, nu0))
    if k_residual <= 0.0:
        raise SolverError("collinear mismatch is not positive; no QPM period exists")
    return _TWO_PI / k_residual * 1e3


def load_sellmeier_file(path) -> SellmeierModel:
    """Load a Sellmeier coefficient set from a plain-text data file.

    Schema (whitespace separated, '#' starts a comment):

        material <name>
        range_nm <lo> <hi>
        tref_c <reference temperature, deg C>
        axes pump=<axis> signal=<axis> idler=<axis>
        axis <name> <A> <B> <C> <D> [dndt_per_k]

    The functional form is fixed: n^2 = A + B / (L^2 - C) + D * L^2 with
    L the vacuum wavelength in um.
    """
    path = Path(path)
    name = path.stem
    axes = {}
    range_nm = None
    tref = 40.8
    roles = {"pump": "e", "signal": "o", "idler": "e"}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0]
        if key == "material":
            name = tok[1]
        elif key == "range_nm":
            range_nm = (float(tok[1]), float(tok[2]))
        elif key == "tref_c":
            tref = float(tok[1])
        elif key == "axes":
            for assign in tok[1:]:
                role, ax = assign.split("=")
                if role not in roles:
                    raise DomainError(f"unknown wave role '{role}' in {path}")
                roles[role] = ax
        elif key == "axis":
            vals = [float(v) for v in tok[2:]]
            if len(vals) == 4:
                vals.append(0.0)
            if len(vals) != 5:
                raise DomainError(f"axis line needs 4 or 5 coefficients: {raw!r}")
            axes[tok[1]] = SellmeierAxis(*vals)
        else:
            raise DomainError(f"unknown key '{key}' in Sellmeier file {path}")
    if not axes:
        raise DomainError(f"no axis coefficients found in {path}")
    if range_nm is None:
        raise DomainError(f"missing 'range_nm' line in {path}")
    return SellmeierModel(
        name=name,
        axes=axes,
        range_nm=range_nm,
        reference_temperature_c=tref,
        temperature_c=tref,
        pump_axis=roles["pump"],
        signal_axis=roles["signal"],
        idler_axis=roles["idler"],
    )


def shipped_ppslt_model() -> SellmeierModel:
    """The coefficient set shipped with the package (see README provenance)."""
    path = Path(__file__).parent / "data" / "ppslt_sellmeier.txt"
    return load_sellmeier_file(path)
