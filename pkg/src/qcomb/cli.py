"""Command-line front end: config-driven figure-reproduction pipelines.

    qcomb <jsa|dip|comb|events|validate|plots> --config cfg.json --out DIR
          [--seed N] [--delays tau_ps ...]

Every command is a pure function of (config, seed): rerunning writes
byte-identical files.  Exit codes: 0 success, 2 validation/domain error,
3 numerical-resolution error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    C_NM_THZ,
    DomainError,
    FreqGrid1D,
    QcombError,
    ResolutionError,
    ValidationError,
)
from .biphoton import marginal_spectrum
from .config import RunConfig, default_config, load_config
from .fileio import (
    write_columns_csv,
    write_event_batch,
    write_histogram1d_csv,
    write_histogram2d_csv,
    write_json,
    write_matrix_csv,
)
from .interference import (
    comb_contrast,
    csi,
    dip_scan,
    extract_qudit,
    find_peaks,
    marginal_toa,
)
from .spectrometer import (
    analytic_toa_reference,
    arrival_histogram,
    bin_csi_reference,
    gaussian_blur,
    reconstruct_csi_histogram,
    relative_l2,
    sample_pairs,
    simulate_events,
    threshold_full_width,
    toa_histogram,
)


def _meta(cfg: RunConfig) -> dict:
    return {"tool": f"qcomb {__version__}", "config": cfg.hash()}


def _delay_label(idx: int, tau_ps: float) -> str:
    return f"d{idx}_tau{tau_ps:.4f}ps".replace(".", "p", 1).replace("-", "m")


def _subgrid(grid: FreqGrid1D, stride: int):
    """Uniform sub-axis through every stride-th grid sample."""
    idx = np.arange(0, grid.n, stride)
    values = grid.values()[idx]
    span = float(values[-1] - values[0])
    center = float(0.5 * (values[0] + values[-1]))
    return idx, FreqGrid1D(center_thz=center, span_thz=span, n=idx.size)


def cmd_validate(cfg: RunConfig, out_dir: Path) -> list:
    print(f"configuration valid (hash {cfg.hash()})")
    return []


def cmd_jsa(cfg: RunConfig, out_dir: Path) -> list:
    jsa = cfg.jsa()
    meta = _meta(cfg)
    files = []
    path = out_dir / "jsa.csv"
    write_matrix_csv(path, jsa.values, jsa.grid, jsa.grid, meta)
    files.append(path)
    report = {}
    for axis, name in ((0, "signal"), (1, "idler")):
        marg = marginal_spectrum(jsa, axis=axis)
        path = out_dir / f"marginal_{name}.csv"
        write_columns_csv(path, {"nu_thz": marg.grid.values(),
                                 "intensity": marg.values}, meta)
        files.append(path)
        report[name] = {
            "fwhm_nm": marg.fwhm_nm,
            "fwhm_thz": marg.fwhm_thz,
            "center_nm": marg.center_nm,
            "multimodal": marg.multimodal,
        }
    path = out_dir / "fwhm_report.json"
    write_json(path, report, meta)
    files.append(path)
    return files


def cmd_dip(cfg: RunConfig, out_dir: Path) -> list:
    jsa = cfg.jsa()
    d = cfg.raw["dip"]
    scan = dip_scan(jsa, -d["tau_max_ps"], d["tau_max_ps"], d["n_samples"],
                    accidental_floor=d["accidental_floor"])
    meta = _meta(cfg)
    files = []
    path = out_dir / "dip_scan.csv"
    write_columns_csv(path, {"tau_ps": scan.tau_ps, "p_coincidence": scan.p}, meta)
    files.append(path)
    m = scan.metrics
    path = out_dir / "dip_metrics.json"
    write_json(path, {
        "visibility": m.visibility,
        "p_baseline": m.p_baseline,
        "p_min": m.p_min,
        "tau_min_ps": m.tau_min_ps,
        "fwhm_fs": m.fwhm_fs,
        "fwhm_um": m.fwhm_um,
        "accidental_floor": scan.accidental_floor,
    }, meta)
    files.append(path)
    return files


def cmd_comb(cfg: RunConfig, out_dir: Path) -> list:
    jsa = cfg.jsa()
    meta = _meta(cfg)
    stride = int(cfg.raw["export"]["csi_stride"])
    pump_nu = cfg.pump_nu_thz()
    files = []
    for i, tau in enumerate(cfg.delays_ps()):
        label = _delay_label(i, tau)
        grid_csi = csi(jsa, tau)
        idx, sub = _subgrid(jsa.grid, stride)
        path = out_dir / f"csi_{label}.csv"
        write_matrix_csv(path, grid_csi.values[np.ix_(idx, idx)], sub, sub,
                         {**meta, "tau_ps": tau})
        files.append(path)
        toa = marginal_toa(grid_csi)
        path = out_dir / f"toa_{label}.csv"
        write_columns_csv(path, {"dnu_thz": toa.dnu_thz, "h": toa.values},
                          {**meta, "tau_ps": tau})
        files.append(path)
        peaks_payload = {
            "tau_ps": tau,
            "count": toa.peaks.count,
            "positions_thz": list(toa.peaks.positions),
            "heights": list(toa.peaks.heights),
            "no_comb": toa.no_comb,
        }
        if toa.peaks.count >= 4:
            # a period estimate needs at least two dark fringes
            peaks_payload["tooth_spacing_thz"] = toa.tooth_spacing()
        path = out_dir / f"peaks_{label}.json"
        write_json(path, peaks_payload, meta)
        files.append(path)
        if tau != 0.0 and not toa.no_comb:
            q = extract_qudit(grid_csi, pump_nu)
            qudit_payload = {
                "tau_ps": tau,
                "no_comb": False,
                "dimension": q.dimension(),
                "teeth": [
                    {
                        "j": t.j,
                        "dnu_thz": t.dnu_thz,
                        "nu_plus_thz": t.nu_plus_thz,
                        "nu_minus_thz": t.nu_minus_thz,
                        "weight": t.weight,
                        "measured_nu1_thz": t.measured_nu1_thz,
                        "measured_nu2_thz": t.measured_nu2_thz,
                    }
                    for t in q.teeth
                ],
            }
        else:
            qudit_payload = {"tau_ps": tau, "no_comb": True, "dimension": 0,
                             "teeth": []}
        path = out_dir / f"qudit_{label}.json"
        write_json(path, qudit_payload, meta)
        files.append(path)
    return files


def cmd_events(cfg: RunConfig, out_dir: Path) -> list:
    jsa = cfg.jsa()
    meta = _meta(cfg)
    s = cfg.raw["spectrometer"]
    map1, map2 = cfg.fiber_maps()
    det = cfg.detector()
    period = s["trigger_period_ns"]
    n_pairs = int(s["n_pairs"])
    stride = int(s["reconstruction_stride"])
    bin_ps = s["tia_bin_ps"]
    files = []
    for i, tau in enumerate(cfg.delays_ps()):
        label = _delay_label(i, tau)
        grid_csi = csi(jsa, tau)
        report = {"tau_ps": tau}
        if grid_csi.total <= 0.0 or grid_csi.values.max() <= 0.0:
            report["skipped"] = "zero-intensity CSI at this delay"
            path = out_dir / f"mc_report_{label}.json"
            write_json(path, report, meta)
            files.append(path)
            continue
        pairs = sample_pairs(grid_csi, n_pairs, seed=cfg.seed + 2 * i)
        batch = simulate_events(pairs, map1, map2, det, det, period,
                                seed=cfg.seed + 2 * i + 1,
                                config_hash=cfg.hash())
        path = out_dir / f"events_{label}.txt"
        write_event_batch(path, batch, {**meta, "tau_ps": tau})
        files.append(path)
        th = toa_histogram(batch, bin_ps)
        path = out_dir / f"toa_hist_{label}.csv"
        write_histogram1d_csv(path, th, {**meta, "tau_ps": tau})
        files.append(path)
        rec = reconstruct_csi_histogram(batch, map1, map2, jsa.grid, stride)
        path = out_dir / f"csi_hist_{label}.csv"
        write_histogram2d_csv(path, rec, {**meta, "tau_ps": tau})
        files.append(path)

        ref = bin_csi_reference(grid_csi, stride)
        report["n_pairs"] = n_pairs
        report["n_coincidences"] = batch.n_coincidences()
        report["n_dropped"] = rec.n_dropped
        report["csi_relative_l2"] = relative_l2(rec.counts, ref)
        if tau != 0.0:
            tooth_period_ns = ((1.0 / abs(tau))
                               * (s["lambda_ref_nm"] ** 2 / C_NM_THZ)
                               * abs(map1.dispersion_ps_per_nm) * 1e-3)
            period_bins = tooth_period_ns / (bin_ps * 1e-3)
            smooth = gaussian_blur(th.counts, 1.0)
            sep = max(2, int(round(0.5 * period_bins)))
            pk = find_peaks(smooth, 0.05, sep, positions=th.centers,
                            min_prominence_frac=0.2)
            report["toa_peak_count"] = pk.count
            report["toa_comb_contrast"] = comb_contrast(th.counts, period_bins)
            report["comb_washed_out"] = pk.count < 2
            ana = analytic_toa_reference(grid_csi, map1, map2, th.edges)
            sigma_bins = (np.sqrt(2.0) * det.jitter_sigma_ns) / (bin_ps * 1e-3)
            report["toa_vs_analytic_l2"] = relative_l2(
                th.counts, gaussian_blur(ana, sigma_bins))
            w_toa = threshold_full_width(th.centers, smooth, 0.05)
            ah = arrival_histogram(batch, 1, bin_ps)
            w_arr = threshold_full_width(ah.centers,
                                         gaussian_blur(ah.counts, 1.0), 0.05)
            report["toa_full_width_ns"] = w_toa
            report["arrival_full_width_ns"] = w_arr
            report["width_ratio"] = w_toa / w_arr
        path = out_dir / f"mc_report_{label}.json"
        write_json(path, report, meta)
        files.append(path)
    return files


_GNUPLOT_TEMPLATES = {
    "dip.gp": """set datafile separator ','
set xlabel 'delay (ps)'
set ylabel 'coincidence probability'
plot 'dip_scan.csv' using 1:2 with lines title 'P(tau)'
pause -1
""",
    "marginal.gp": """set datafile separator ','
set xlabel 'frequency (THz)'
set ylabel 'intensity'
plot 'marginal_signal.csv' using 1:2 with lines title 'signal marginal'
pause -1
""",
    "toa.gp": """set datafile separator ','
set xlabel 'frequency difference (THz)'
set ylabel 'H'
plot 'toa_d4_tau2p0014ps.csv' using 1:2 with lines title 'H at 600 um'
pause -1
""",
}


def cmd_plots(cfg: RunConfig, out_dir: Path) -> list:
    files = []
    for name, body in _GNUPLOT_TEMPLATES.items():
        path = out_dir / name
        path.write_text(f"# qcomb {__version__} config={cfg.hash()}\n" + body)
        files.append(path)
    return files


_COMMANDS = {
    "validate": cmd_validate,
    "jsa": cmd_jsa,
    "dip": cmd_dip,
    "comb": cmd_comb,
    "events": cmd_events,
    "plots": cmd_plots,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcomb",
        description="Spectrally resolved HOM interference simulator: "
                    "engineered biphoton combs and their fiber-spectrometer "
                    "readout.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON configuration (defaults used when omitted)")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory (created if missing)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured RNG seed")
    parser.add_argument("--delays", type=float, nargs="+", default=None,
                        metavar="TAU_PS", help="override the delay list (ps)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        cfg = cfg.with_overrides(seed=args.seed, delays_ps=args.delays)
        out_dir = args.out
        if args.command != "validate":
            out_dir.mkdir(parents=True, exist_ok=True)
        files = _COMMANDS[args.command](cfg, out_dir)
        for f in files:
            print(f)
        return 0
    except ValidationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except ResolutionError as exc:
        print(f"error: numerical resolution: {exc}", file=sys.stderr)
        return 3
    except (DomainError, QcombError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
