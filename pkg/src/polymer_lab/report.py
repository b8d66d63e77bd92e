"""Result persistence: delimited output, run manifests, and figures.

Every report command writes a CSV body whose bytes are a pure function of
the plan, a JSON manifest that references the CSV by content hash, and a
rendered PNG alongside.  Floats are printed with 17 significant digits so
fixtures round-trip exactly.
"""
from __future__ import annotations

import csv
import datetime
import hashlib
import io
import json
import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import __version__

__all__ = [
    "fmt_float",
    "resolve_out_dir",
    "ensure_writable",
    "write_csv",
    "write_manifest",
    "figure_power_law",
    "figure_series",
]


def fmt_float(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def resolve_out_dir(out: str | None, command: str) -> Path:
    """Output directory for a command: --out wins, then POLYMER_LAB_OUT,
    then ./out; a per-command subdirectory keeps artifacts separable."""
    root = out or os.environ.get("POLYMER_LAB_OUT") or "out"
    d = Path(root) / command
    d.mkdir(parents=True, exist_ok=True)
    return d


def ensure_writable(paths, force: bool) -> None:
    existing = [str(p) for p in paths if Path(p).exists()]
    if existing and not force:
        raise FileExistsError(
            f"refusing to overwrite existing artifacts (use --force): {', '.join(existing)}"
        )


def write_csv(path, header, rows) -> str:
    """RFC-4180 body with CRLF line endings; returns the sha256 hex digest."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) for v in row])
    data = buf.getvalue().encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def write_manifest(path, command, plan, seed, csv_hashes, started, extra=None) -> None:
    doc = {
        "schema": 1,
        "command": command,
        "version": __version__,
        "plan": plan,
        "seed": seed,
        "artifacts": csv_hashes,
        "started": started,
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def figure_power_law(path, rows, fit, xlabel, ylabel, title) -> None:
    """Log-log scatter with error bars and, when available, the fitted line."""
    import numpy as np

    xs = [r.N for r in rows]
    ys = [r.value for r in rows]
    es = [r.stderr for r in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(xs, ys, yerr=es, fmt="o", capsize=3, label="estimate")
    if fit is not None:
        grid = np.geomspace(min(xs), max(xs), 64)
        ax.plot(
            grid,
            np.exp(fit.intercept) * grid**fit.slope,
            "--",
            label=f"slope {fit.slope:.3f} ± {fit.slope_stderr:.3f}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_series(path, xs, series, xlabel, ylabel, title, logx=False, logy=False) -> None:
    """Plain line/marker plot of one or more named series over a shared x grid."""
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, ys, band in series:
        ax.plot(xs, ys, "o-", label=label)
        if band is not None:
            lo, hi = band
            ax.fill_between(xs, lo, hi, alpha=0.2)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
