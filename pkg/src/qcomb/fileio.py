"""Text serialization: CSV grids and columns, event batches, JSON reports.

Everything is written with 17 significant digits (%.17g), which round-trips
IEEE doubles exactly, and carries a comment header with the tool version and
the configuration hash so outputs are traceable and reruns are
byte-comparable.  JSON files carry the same metadata as ordinary fields.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import DomainError, FreqGrid1D
from .spectrometer import EventBatch

FLOAT_FMT = "%.17g"


def _header_lines(meta: dict) -> str:
    out = []
    for key, value in meta.items():
        out.append(f"# {key}={value}")
    return "\n".join(out)


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def write_matrix_csv(path, values: np.ndarray, grid1: FreqGrid1D,
                     grid2: FreqGrid1D, meta: dict) -> None:
    """Matrix CSV: header comments, two axis-definition lines, value rows.

    Row i corresponds to axis1 sample i, column j to axis2 sample j.
    """
    values = np.asarray(values)
    lines = [_header_lines(meta)]
    lines.append(f"# axis1 center_thz={_fmt(grid1.center_thz)} "
                 f"span_thz={_fmt(grid1.span_thz)} n={grid1.n}")
    lines.append(f"# axis2 center_thz={_fmt(grid2.center_thz)} "
                 f"span_thz={_fmt(grid2.span_thz)} n={grid2.n}")
    body = "\n".join(",".join(_fmt(v) for v in row) for row in values)
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n")


def read_matrix_csv(path):
    """Inverse of :func:`write_matrix_csv`; returns (values, grid1, grid2)."""
    grids = []
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# axis"):
            fields = dict(tok.split("=") for tok in line.split()[2:])
            grids.append(FreqGrid1D(
                center_thz=float(fields["center_thz"]),
                span_thz=float(fields["span_thz"]),
                n=int(fields["n"]),
            ))
        elif line.startswith("#") or not line.strip():
            continue
        else:
            rows.append([float(v) for v in line.split(",")])
    if len(grids) != 2:
        raise DomainError(f"{path}: expected two axis headers")
    values = np.asarray(rows)
    if values.shape != (grids[0].n, grids[1].n):
        raise DomainError(f"{path}: matrix shape does not match its axis headers")
    return values, grids[0], grids[1]


def write_columns_csv(path, columns: dict, meta: dict) -> None:
    """Column CSV with a named header row under the comment block."""
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise DomainError("column lengths differ")
    lines = [_header_lines(meta), ",".join(names)]
    for i in range(n):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n")


def read_columns_csv(path) -> dict:
    names = None
    cols = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        if names is None:
            names = line.split(",")
            cols = [[] for _ in names]
        else:
            for c, v in zip(cols, line.split(",")):
                c.append(float(v))
    if names is None:
        raise DomainError(f"{path}: no column header found")
    return {k: np.asarray(c) for k, c in zip(names, cols)}


def write_json(path, payload: dict, meta: dict) -> None:
    doc = dict(meta)
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_event_batch(path, batch: EventBatch, meta: dict) -> None:
    """Line-oriented time tags: ``trigger_index t1_ns t2_ns``, '-' = missing.

    This format is the substitution point for real time-tagger data.
    """
    lines = [_header_lines(meta), f"# seed={batch.seed}",
             f"# n_triggers={batch.n_triggers}", "# trigger_index t1_ns t2_ns"]
    t1 = batch.t1_ns
    t2 = batch.t2_ns
    for k in range(batch.n_triggers):
        a = "-" if np.isnan(t1[k]) else _fmt(t1[k])
        b = "-" if np.isnan(t2[k]) else _fmt(t2[k])
        lines.append(f"{batch.trigger[k]} {a} {b}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_event_batch(path) -> EventBatch:
    trigger = []
    t1 = []
    t2 = []
    seed = 0
    config_hash = ""
    for line in Path(path).read_text().splitlines():
        if line.startswith("# seed="):
            seed = int(line.split("=", 1)[1])
            continue
        if line.startswith("# config="):
            config_hash = line.split("=", 1)[1]
            continue
        if line.startswith("#") or not line.strip():
            continue
        tok = line.split()
        if len(tok) != 3:
            raise DomainError(f"{path}: malformed event line {line!r}")
        trigger.append(int(tok[0]))
        t1.append(np.nan if tok[1] == "-" else float(tok[1]))
        t2.append(np.nan if tok[2] == "-" else float(tok[2]))
    return EventBatch(
        trigger=np.asarray(trigger, dtype=np.int64),
        t1_ns=np.asarray(t1),
        t2_ns=np.asarray(t2),
        seed=seed,
        config_hash=config_hash,
    )


def write_histogram1d_csv(path, hist, meta: dict) -> None:
    lines = [_header_lines(meta),
             "# bin_edges_ns=" + " ".join(_fmt(e) for e in hist.edges),
             "bin_center_ns,count"]
    centers = hist.centers
    for c, v in zip(centers, hist.counts):
        lines.append(f"{_fmt(c)},{int(v)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_histogram2d_csv(path, hist, meta: dict) -> None:
    lines = [_header_lines(meta),
             "# edges1_thz=" + " ".join(_fmt(e) for e in hist.edges1),
             "# edges2_thz=" + " ".join(_fmt(e) for e in hist.edges2),
             f"# n_dropped={hist.n_dropped}"]
    body = "\n".join(",".join(str(int(v)) for v in row) for row in hist.counts)
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n")
