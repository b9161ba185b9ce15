"""Render sweep result CSVs as heatmaps or curve families.

Presentation only: rows are read from the documented result schema and
painted as-is, never re-aggregated.  Output is deterministic for a given
CSV and spec: fixed figure geometry, a pinned SVG hash salt, and no
timestamps in the file metadata.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("heatmap", "curves")

_FIGSIZE = (6.4, 4.8)
_DPI = 100


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: a value column over an (x, y) grid or per-y curves."""

    input: str | Path
    kind: str
    x: str
    y: str
    value: str = "recovery_rate"
    out: str | Path = "plot.svg"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def _read_rows(path: Path, needed: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise ValueError("no data rows")
        missing = [c for c in needed if c not in header]
        if missing:
            raise ValueError(
                f"missing columns {missing}; available columns: {list(header)}"
            )
        rows = list(reader)
    if not rows:
        raise ValueError("no data rows")
    return rows


def _column(rows: list[dict], name: str) -> np.ndarray:
    try:
        return np.array([float(r[name]) for r in rows])
    except ValueError as exc:
        raise ValueError(f"column {name!r} has a non-numeric entry: {exc}") from exc


def _save(fig, out: Path) -> None:
    ext = out.suffix.lower()
    if ext == ".svg":
        # pinned salt keeps element ids stable; "none" keeps labels as text
        with plt.rc_context({"svg.hashsalt": "sparse-actions-plots",
                             "svg.fonttype": "none"}):
            fig.savefig(out, format="svg", metadata={"Date": None})
    elif ext == ".png":
        fig.savefig(out, format="png", dpi=_DPI)
    else:
        raise ValueError(f"output must end in .svg or .png, got {out.name!r}")


def render(spec: PlotSpec) -> Path:
    """Draw the requested figure and return the written path.

    Heatmap: the value column over the (x, y) grid, axes labeled by column
    name, with a colorbar.  When the same cell appears more than once the
    last row wins.  Curves: value against x, one line per distinct y, with
    a legend.
    """
    path = Path(spec.input)
    out = Path(spec.out)
    rows = _read_rows(path, (spec.x, spec.y, spec.value))
    xs = _column(rows, spec.x)
    ys = _column(rows, spec.y)
    vals = _column(rows, spec.value)

    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    try:
        if spec.kind == "heatmap":
            ux = np.unique(xs)
            uy = np.unique(ys)
            grid = np.full((uy.size, ux.size), np.nan)
            for x, y, v in zip(xs, ys, vals):
                grid[np.searchsorted(uy, y), np.searchsorted(ux, x)] = v
            mesh = ax.imshow(grid, origin="lower", aspect="auto",
                             interpolation="nearest")
            ax.set_xticks(range(ux.size), [f"{v:g}" for v in ux])
            ax.set_yticks(range(uy.size), [f"{v:g}" for v in uy])
            fig.colorbar(mesh, ax=ax, label=spec.value)
        else:
            for y in np.unique(ys):
                mask = ys == y
                order = np.argsort(xs[mask])
                ax.plot(xs[mask][order], vals[mask][order], marker="o",
                        label=f"{spec.y}={y:g}")
            ax.set_ylabel(spec.value)
            ax.legend()
        ax.set_xlabel(spec.x)
        if spec.kind == "heatmap":
            ax.set_ylabel(spec.y)
        _save(fig, out)
    finally:
        plt.close(fig)
    return out
