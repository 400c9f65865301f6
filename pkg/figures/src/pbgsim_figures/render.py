"""Shared rendering defaults: vector output, byte-stable across reruns."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

RC = {
    "figure.figsize": (6.0, 4.0),
    "font.size": 10,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "legend.frameon": False,
    "svg.hashsalt": "pbgsim-figures",
}


def save(fig, out_path) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(RC):
        fig.savefig(out, metadata={"Date": None} if out.suffix == ".svg" else None)
    plt.close(fig)
    return out


def new_axes():
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
    return fig, ax
