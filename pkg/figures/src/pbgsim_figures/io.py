"""CSV loading and grid alignment for the figure scripts.

Inputs are the simulator's delimited outputs; they are read, never written.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input CSV is empty or lacks the columns a figure needs."""


@dataclass(frozen=True)
class Curve:
    label: str
    columns: dict

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]


def label_for(path: Path) -> str:
    """Legend label from the file name: oracle.csv -> 'exact', run_N50 -> 'N=50'."""
    stem = Path(path).stem
    if "oracle" in stem:
        return "exact"
    if "_N" in stem:
        return "N=" + stem.rsplit("_N", 1)[1]
    return stem


def read_curve(path, required, label: str | None = None) -> Curve:
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}; found {header}")
    if len(lines) < 2:
        raise SchemaError(f"{path}: no data rows")
    data = np.array([[float(x) if x else np.nan for x in ln.split(",")] for ln in lines[1:]])
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows")
    cols = {name: data[:, i] for i, name in enumerate(header)}
    return Curve(label or label_for(path), cols)


def align_grids(curves: list[Curve], fields) -> list[Curve]:
    """Resample all curves onto a shared time grid when they disagree.

    The shared grid is the first curve's grid restricted to the overlap of
    all time ranges; a warning records that interpolation happened.
    """
    first = curves[0].t
    if all(len(c.t) == len(first) and np.allclose(c.t, first) for c in curves[1:]):
        return curves
    lo = max(c.t[0] for c in curves)
    hi = min(c.t[-1] for c in curves)
    if hi <= lo:
        raise SchemaError("input curves have no overlapping time interval")
    grid = first[(first >= lo) & (first <= hi)]
    warnings.warn(
        f"inputs use different time grids; resampling onto [{lo:g}, {hi:g}]",
        stacklevel=2,
    )
    out = []
    for c in curves:
        cols = {"t": grid}
        for f in fields:
            if f in c.columns:
                cols[f] = np.interp(grid, c.t, c.columns[f])
        out.append(Curve(c.label, cols))
    return out
