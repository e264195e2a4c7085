"""CSV and SVG emission for run records."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from ecsbell import __version__, kernels
from ecsbell.record import RunRecord


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(value)


def render_csv(record: RunRecord) -> str:
    """Header comments, one header row, data rows, then ``#`` footer lines."""
    buf = io.StringIO()
    buf.write(f"# ecsbell: {__version__}\n")
    buf.write(f"# backend: {kernels.BACKEND}\n")
    buf.write(f"# mode: {record.mode}\n")
    for key, value in record.config.items():
        if key != "mode":
            buf.write(f"# config.{key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.columns)
    for row in record.rows:
        writer.writerow([format_value(v) for v in row])
    for key, value in record.footer.items():
        buf.write(f"# {key}: {format_value(value)}\n")
    for check in record.checks:
        buf.write(f"# check.{check.name}: {check.status} measured={format_value(check.measured)} "
                  f"tolerance={format_value(check.tolerance)}\n")
    return buf.getvalue()


def write_csv(record: RunRecord, out=None) -> str:
    text = render_csv(record)
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


PLOT_AXES = {
    "correlations": ("alpha1", ("E11", "E12", "E21", "E22", "M11", "M12", "M21", "M22")),
    "bell-sweep": ("alpha1", ("S_RP", "S_BW")),
    "bell-grid": ("alpha2", ("S_RP",)),
    "bw-optimize": ("alpha1", ("S_BW",)),
    "gate-fidelity": ("t", ("fidelity",)),
}


def write_plot(record: RunRecord, path) -> Path | None:
    """SVG line plot next to the CSV; returns None for modes without a natural plot."""
    if record.mode not in PLOT_AXES:
        return None
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xname, ynames = PLOT_AXES[record.mode]
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    if record.mode == "bell-grid":
        # one line per alpha1 value
        a1 = np.asarray(record.column("alpha1"))
        x, y = np.asarray(record.column(xname)), np.asarray(record.column("S_RP"))
        for v in np.unique(a1):
            m = a1 == v
            ax.plot(x[m], y[m], lw=1, label=f"alpha1={v:g}")
        if len(np.unique(a1)) <= 10:
            ax.legend(fontsize=7)
    else:
        x = record.column(xname)
        for name in ynames:
            style = ":" if name.startswith("M") else "-"
            ax.plot(x, record.column(name), style, lw=1.2, label=name)
        ax.legend(fontsize=7)
    if record.mode in ("bell-sweep", "bell-grid", "bw-optimize"):
        ax.axhline(2.0, color="grey", lw=0.6)
        ax.axhline(2 * math.sqrt(2), color="grey", lw=0.6, ls="--")
    ax.set_xlabel(xname)
    fig.tight_layout()
    # fixed metadata keeps the SVG stable across runs
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
