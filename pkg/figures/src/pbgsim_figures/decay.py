"""Overlay excited-state decay curves for several mode counts against the
exact reference, with an inset zooming the long-time tail."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .io import SchemaError, align_grids, read_curve
from .render import new_axes, save

REQUIRED = ("t", "p_excited")

# line styles keyed by legend label, mirroring the usual print conventions:
# exact solid, then dotted / long-dashed / dash-dotted as N grows
STYLE_CYCLE = [
    {"linestyle": (0, (1.5, 2.0)), "color": "tab:blue"},
    {"linestyle": (0, (7.0, 3.0)), "color": "tab:orange"},
    {"linestyle": "dashdot", "color": "tab:green"},
    {"linestyle": (0, (4.0, 1.5, 1.0, 1.5)), "color": "tab:red"},
]
EXACT_STYLE = {"linestyle": "solid", "color": "black"}


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple
    output: Path
    inset_window: Optional[tuple] = None  # (t0, t1); None picks the last 30%
    show_inset: bool = True
    labels: Optional[tuple] = None


def _styles(curves):
    cycle = iter(STYLE_CYCLE)
    for c in curves:
        yield EXACT_STYLE if c.label == "exact" else next(cycle, {"linestyle": "dashed"})


def plot_decay_convergence(spec: FigureSpec) -> Path:
    if len(spec.inputs) < 1:
        raise SchemaError("need at least one input curve")
    labels = spec.labels or [None] * len(spec.inputs)
    curves = [read_curve(p, REQUIRED, lab) for p, lab in zip(spec.inputs, labels)]
    curves = align_grids(curves, ["p_excited"])

    fig, ax = new_axes()
    for curve, style in zip(curves, _styles(curves)):
        ax.plot(curve.t, curve.columns["p_excited"], label=curve.label, **style)
    ax.set_xlabel("time  (units of $C^{-2/3}$)")
    ax.set_ylabel("excited-state population")
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="upper right")

    want_inset = spec.show_inset and (len(curves) >= 2 or spec.inset_window is not None)
    if want_inset:
        t = curves[0].t
        t0, t1 = spec.inset_window or (t[0] + 0.7 * (t[-1] - t[0]), t[-1])
        axins = ax.inset_axes([0.42, 0.45, 0.53, 0.35])
        for curve, style in zip(curves, _styles(curves)):
            sel = (curve.t >= t0) & (curve.t <= t1)
            axins.plot(curve.t[sel], curve.columns["p_excited"][sel], **style)
        axins.set_xlim(t0, t1)
        axins.tick_params(labelsize=8)
        axins.set_title("long-time behavior", fontsize=8)
    return save(fig, spec.output)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pbgsim-fig-decay",
        description="Overlay decay curves (CSV with columns t,p_excited) "
        "against the exact reference",
    )
    parser.add_argument("inputs", nargs="+", help="curve CSV files (oracle.csv, run_N*.csv)")
    parser.add_argument("-o", "--out", default="decay_convergence.svg")
    parser.add_argument("--inset", nargs=2, type=float, metavar=("T0", "T1"),
                        help="inset window; defaults to the last 30%% of the run")
    parser.add_argument("--no-inset", action="store_true")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        inputs=tuple(args.inputs),
        output=Path(args.out),
        inset_window=tuple(args.inset) if args.inset else None,
        show_inset=not args.no_inset,
    )
    try:
        out = plot_decay_convergence(spec)
    except (SchemaError, OSError) as exc:
        print(f"pbgsim-fig-decay: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
