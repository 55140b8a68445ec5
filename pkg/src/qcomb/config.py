"""Run configuration: JSON schema, validation, defaults, pipeline assembly.

The default configuration reproduces the reference experiment at desk
scale: a 2 ps pump at 792 nm, a 40 mm group-velocity-matched crystal with a
21.5 um poling period, collection arms filtered to a 22 nm single-photon
marginal, a scan of six delay positions, and two 7.5 km dispersive-fiber
spectrometer arms read out by jittery gated detectors.

The filter constants below are calibrated numbers: the apodization width
sets the smooth source/collection roll-off and the long-pass cut-on trims
the anti-correlated spectrum so the filtered marginal is 22.0 nm wide (see
``qcomb.biphoton.calibrate_lpf_cuton``).  The no-long-pass variant swaps in
an apodization calibrated to a 35 nm marginal on a wider grid.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .core import (
    C_NM_THZ,
    FreqGrid1D,
    ValidationError,
    delay_position_to_time,
    wavelength_to_frequency,
)
from .biphoton import FilterSpec, PumpSpec, assemble_jsa, load_filter_table
from .dispersion import CrystalSpec, TaylorDispersion, shipped_ppslt_model
from .spectrometer import DetectorSpec, fiber_map

# Calibrated source/filter defaults (frozen by tools/design_defaults.py).
DEGENERATE_NM = 1584.0
APOD_FWHM_NM = 32.0                 # collection roll-off (transmission FWHM)
LPF_CUTON_NM = 1570.014465          # filtered marginal = 22.0 nm
LPF_EDGE_NM = 4.0
NOLPF_APOD_FWHM_NM = 49.4843        # no-long-pass marginal = 35.0 nm
TAYLOR_INV_VG_SIGNAL = 7.21343051   # ps/mm, from the shipped Sellmeier set
TAYLOR_INV_VG_PUMP_OFFSET = 0.03    # ps/mm; keeps the ridge pump-dominated


def _taylor_defaults() -> dict:
    return {
        "nu0_thz": wavelength_to_frequency(DEGENERATE_NM),
        "inv_vg_signal": TAYLOR_INV_VG_SIGNAL,
        "inv_vg_idler": TAYLOR_INV_VG_SIGNAL,
        "inv_vg_pump": TAYLOR_INV_VG_SIGNAL + TAYLOR_INV_VG_PUMP_OFFSET,
        "beta2_pump": 0.0,
        "beta2_signal": 0.0,
        "beta2_idler": 0.0,
    }


DEFAULTS = {
    "pump": {"center_nm": 792.0, "fwhm_ps": 2.0},
    "crystal": {
        "length_mm": 40.0,
        "poling_period_um": 21.5,
        "backend": "taylor",
        "temperature_c": 40.8,
        "taylor": _taylor_defaults(),
        "sellmeier_file": None,
    },
    "filters": {
        "enabled": True,
        "lpf_cuton_nm": LPF_CUTON_NM,
        "lpf_edge_nm": LPF_EDGE_NM,
        "apod_center_nm": DEGENERATE_NM,
        "apod_fwhm_nm": APOD_FWHM_NM,
        "signal_table_file": None,
        "idler_table_file": None,
        "signal_shift_nm": 0.0,
        "idler_shift_nm": 0.0,
    },
    "grid": {"center_nm": DEGENERATE_NM, "span_nm": 80.0, "n": 1024},
    "delays_um": [0.0, 40.0, 160.0, 320.0, 600.0, 2100.0],
    "delays_ps": None,
    "dip": {"tau_max_ps": 1.0, "n_samples": 201, "accidental_floor": 0.0},
    "spectrometer": {
        "dispersion_ps_per_nm_km": 18.0,
        "fiber_km": 7.5,
        "lambda_ref_nm": DEGENERATE_NM,
        "offset_ns": 6.0,
        "trigger_period_ns": 1e3 / 76.0,
        "jitter_fwhm_ps": 80.0,
        "efficiency": 0.7,
        "accidental_rate": 0.0,
        "tia_bin_ps": 100.0,
        "n_pairs": 1_000_000,
        "reconstruction_stride": 8,
    },
    "export": {"csi_stride": 4},
    "seed": 12345,
}


def _merge(defaults, override, path=""):
    """Overlay a user config on the defaults.

    Absent fields inherit their default; an explicit ``null`` is kept and
    rejected later if the field is required.
    """
    if isinstance(defaults, dict):
        if not isinstance(override, dict):
            raise ValidationError(path or "<root>", "expected an object")
        out = {}
        for key in override:
            if key not in defaults:
                raise ValidationError(f"{path}.{key}".lstrip("."), "unknown field")
        for key, dv in defaults.items():
            sub = f"{path}.{key}".lstrip(".")
            if key not in override:
                out[key] = dv
            elif isinstance(dv, dict):
                out[key] = _merge(dv, override[key], sub)
            else:
                out[key] = override[key]
        return out
    return override


def _require_number(d, path, key, lo=None, hi=None, allow_none=False):
    full = f"{path}.{key}".lstrip(".")
    if key not in d or d[key] is None:
        if allow_none:
            return None
        raise ValidationError(full, "missing required value")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(full, "must be a finite number")
    if lo is not None and v < lo:
        raise ValidationError(full, f"must be >= {lo}")
    if hi is not None and v > hi:
        raise ValidationError(full, f"must be <= {hi}")
    return float(v)


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``raw`` is the fully resolved dict."""

    raw: dict

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    def hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def with_overrides(self, seed=None, delays_ps=None) -> "RunConfig":
        raw = json.loads(json.dumps(self.raw))
        if seed is not None:
            raw["seed"] = int(seed)
        if delays_ps is not None:
            raw["delays_ps"] = [float(t) for t in delays_ps]
            raw["delays_um"] = None
        return RunConfig(raw=raw)

    # -- leaf builders ---------------------------------------------------

    def pump(self) -> PumpSpec:
        p = self.raw["pump"]
        return PumpSpec(center_nm=p["center_nm"], fwhm_ps=p["fwhm_ps"])

    def grid(self) -> FreqGrid1D:
        g = self.raw["grid"]
        center = wavelength_to_frequency(g["center_nm"])
        span = C_NM_THZ * g["span_nm"] / g["center_nm"] ** 2
        return FreqGrid1D(center_thz=center, span_thz=span, n=int(g["n"]))

    def crystal(self) -> CrystalSpec:
        c = self.raw["crystal"]
        if c["backend"] == "taylor":
            t = c["taylor"]
            backend = TaylorDispersion(
                nu0_thz=t["nu0_thz"],
                inv_vg_pump=t["inv_vg_pump"],
                inv_vg_signal=t["inv_vg_signal"],
                inv_vg_idler=t["inv_vg_idler"],
                beta2_pump=t["beta2_pump"],
                beta2_signal=t["beta2_signal"],
                beta2_idler=t["beta2_idler"],
                base_mismatch_per_mm=2.0 * math.pi / (c["poling_period_um"] * 1e-3),
            )
        else:
            if c["sellmeier_file"]:
                from .dispersion import load_sellmeier_file

                backend = load_sellmeier_file(c["sellmeier_file"])
            else:
                backend = shipped_ppslt_model()
            backend = backend.at_temperature(c["temperature_c"])
        return CrystalSpec(
            length_mm=c["length_mm"],
            poling_period_um=c["poling_period_um"],
            dispersion=backend,
        )

    def filters(self):
        f = self.raw["filters"]

        def arm(shift_nm, table_file):
            if table_file:
                return load_filter_table(table_file)
            return FilterSpec(
                lpf_cuton_nm=(f["lpf_cuton_nm"] + shift_nm) if f["enabled"] else None,
                lpf_edge_nm=f["lpf_edge_nm"],
                apod_center_nm=f["apod_center_nm"] + shift_nm,
                apod_fwhm_nm=f["apod_fwhm_nm"],
            )

        return (
            arm(f["signal_shift_nm"], f["signal_table_file"]),
            arm(f["idler_shift_nm"], f["idler_table_file"]),
        )

    def jsa(self):
        fs, fi = self.filters()
        return assemble_jsa(self.pump(), self.crystal(), fs, fi, self.grid())

    def delays_ps(self) -> list:
        if self.raw["delays_ps"] is not None:
            return [float(t) for t in self.raw["delays_ps"]]
        return [delay_position_to_time(d) for d in self.raw["delays_um"]]

    def pump_nu_thz(self) -> float:
        return wavelength_to_frequency(self.raw["pump"]["center_nm"])

    def detector(self) -> DetectorSpec:
        s = self.raw["spectrometer"]
        return DetectorSpec(
            jitter_fwhm_ps=s["jitter_fwhm_ps"],
            efficiency=s["efficiency"],
            accidental_rate=s["accidental_rate"],
        )

    def fiber_maps(self):
        s = self.raw["spectrometer"]
        grid = self.grid()
        # The calibrated band covers the full grid plus the half-cell
        # dithering margin used by the pair sampler.
        h = grid.spacing
        band = (C_NM_THZ / (grid.hi + h), C_NM_THZ / (grid.lo - h))
        m = fiber_map(
            dispersion_ps_per_nm_km=s["dispersion_ps_per_nm_km"],
            length_km=s["fiber_km"],
            lambda_ref_nm=s["lambda_ref_nm"],
            offset_ns=s["offset_ns"],
            band_nm=band,
        )
        return m, m


def _validate(raw: dict) -> dict:
    resolved = _merge(DEFAULTS, raw)
    _require_number(resolved["pump"], "pump", "center_nm", lo=1e-6)
    _require_number(resolved["pump"], "pump", "fwhm_ps", lo=1e-6)
    c = resolved["crystal"]
    _require_number(c, "crystal", "length_mm", lo=1e-9)
    _require_number(c, "crystal", "poling_period_um", lo=1e-9)
    if c["backend"] not in ("taylor", "sellmeier"):
        raise ValidationError("crystal.backend", "must be 'taylor' or 'sellmeier'")
    g = resolved["grid"]
    _require_number(g, "grid", "center_nm", lo=1e-6)
    _require_number(g, "grid", "span_nm", lo=1e-6)
    if not isinstance(g["n"], int) or g["n"] < 2:
        raise ValidationError("grid.n", "must be an integer >= 2")
    f = resolved["filters"]
    if f["enabled"]:
        _require_number(f, "filters", "lpf_cuton_nm", lo=1.0)
        _require_number(f, "filters", "lpf_edge_nm", lo=1e-9)
    if f["apod_fwhm_nm"] is not None:
        _require_number(f, "filters", "apod_fwhm_nm", lo=1e-9)
        _require_number(f, "filters", "apod_center_nm", lo=1e-6)
    if resolved["delays_ps"] is None and resolved["delays_um"] is None:
        raise ValidationError("delays_um", "a delay list is required")
    delays = resolved["delays_ps"] if resolved["delays_ps"] is not None else resolved["delays_um"]
    if not isinstance(delays, list) or len(delays) == 0:
        raise ValidationError("delays_um", "delay list must be non-empty")
    s = resolved["spectrometer"]
    _require_number(s, "spectrometer", "dispersion_ps_per_nm_km")
    _require_number(s, "spectrometer", "fiber_km", lo=0.0)
    _require_number(s, "spectrometer", "trigger_period_ns", lo=1e-9)
    _require_number(s, "spectrometer", "jitter_fwhm_ps", lo=0.0)
    _require_number(s, "spectrometer", "efficiency", lo=0.0, hi=1.0)
    _require_number(s, "spectrometer", "tia_bin_ps", lo=1e-9)
    if not isinstance(s["n_pairs"], int) or s["n_pairs"] < 1:
        raise ValidationError("spectrometer.n_pairs", "must be an integer >= 1")
    if not isinstance(resolved["seed"], int):
        raise ValidationError("seed", "must be an integer")
    d = resolved["dip"]
    _require_number(d, "dip", "tau_max_ps", lo=1e-9)
    if not isinstance(d["n_samples"], int) or d["n_samples"] < 11:
        raise ValidationError("dip.n_samples", "must be an integer >= 11")
    _require_number(d, "dip", "accidental_floor", lo=0.0)
    return resolved


def make_config(overrides: dict | None = None) -> RunConfig:
    """Resolve overrides against the defaults and validate."""
    return RunConfig(raw=_validate(overrides or {}))


def default_config() -> RunConfig:
    return make_config({})


def load_config(path) -> RunConfig:
    """Load and validate a JSON configuration file."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError("<file>", f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("<root>", "top level must be an object")
    return make_config(raw)


def no_lpf_variant(base: RunConfig | None = None) -> RunConfig:
    """The wider, unfiltered source: long-pass off, 35 nm marginal.

    Uses a 140 nm grid span so the broader spectrum keeps clear of the grid
    edge (the comb teeth of the longest delay stay resolved at 1024 samples).
    """
    raw = json.loads(json.dumps((base or default_config()).raw))
    raw["filters"]["enabled"] = False
    raw["filters"]["apod_fwhm_nm"] = NOLPF_APOD_FWHM_NM
    raw["grid"]["span_nm"] = 140.0
    return make_config(raw)
