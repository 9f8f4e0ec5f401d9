"""CSV and plot emission.

Every CSV starts with ``# afescale-csv v1 <kind>`` (plus optional
``# key: value`` note lines), then a header row. Floats are written with
``repr`` so reruns are byte-identical. Files are written to a temporary
sibling and renamed into place.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from collections import defaultdict
from pathlib import Path

from afescale.commands import Table

__all__ = ["CSV_SCHEMA_VERSION", "format_cell", "render_csv", "write_atomic", "write_csv", "write_plot"]

CSV_SCHEMA_VERSION = 1


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("inf" if value > 0 else "-inf" if value < 0 else "nan")
    return str(value)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# afescale-csv v{CSV_SCHEMA_VERSION} {table.kind}\n")
    for key, note in table.notes.items():
        buf.write(f"# {key}: {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_csv(table: Table, path: Path) -> Path:
    write_atomic(path, render_csv(table).encode("utf-8"))
    return path


# (x column, series key columns, y column, x log scale, x label)
_PLOTS = {
    "qam": ("pe2", ("m2", "mu_db"), "savings_pct", True, "Pe2"),
    "coding-savings": ("g_c_db", ("r_c", "mu_db"), "savings_pct", False, "coding gain g_c [dB]"),
    "fading": ("mu_db", ("omega", "policy"), "savings_pct", False, "tuning range mu [dB]"),
    "interference": ("delta", ("mu_db",), "savings_pct", False, "probability of high interference delta"),
}


def write_plot(table: Table, path: Path) -> Path | None:
    """Static SVG of savings curves; returns None for tables without a plot."""
    layout = _PLOTS.get(table.kind)
    if layout is None:
        return None
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x_col, keys, y_col, logx, xlabel = layout
    series: dict[tuple, list[tuple[float, float]]] = defaultdict(list)
    for rec in table.records():
        series[tuple(rec[k] for k in keys)].append((rec[x_col], rec[y_col]))

    with matplotlib.rc_context({"svg.hashsalt": "afescale", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        for key, pts in series.items():
            pts.sort()
            label = ", ".join(f"{k}={format_cell(v)}" for k, v in zip(keys, key))
            ax.plot([p[0] for p in pts], [p[1] for p in pts], label=label)
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("AFE power savings [%]")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=6, ncol=2)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    write_atomic(path, buf.getvalue())
    return path
