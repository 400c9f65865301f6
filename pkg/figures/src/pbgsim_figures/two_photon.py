"""Render the two-excitation run: atomic inversion, defect photon number and
the reservoir one-/two-photon sector populations against time."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .io import SchemaError, read_curve
from .render import new_axes, save

REQUIRED = ("t", "p_excited", "n_defect", "p_res_one", "p_res_two")

SERIES = (
    ("p_excited", "atomic inversion", {"linestyle": "solid", "color": "black"}),
    ("n_defect", "defect photon number", {"linestyle": (0, (7.0, 3.0)), "color": "tab:orange"}),
    ("p_res_one", "one-photon sector", {"linestyle": "dashdot", "color": "tab:green"}),
    ("p_res_two", "two-photon sector", {"linestyle": (0, (1.5, 2.0)), "color": "tab:blue"}),
)


@dataclass(frozen=True)
class FigureSpec:
    input: Path
    output: Path
    overlay_norm: bool = False


def plot_two_photon(spec: FigureSpec) -> Path:
    required = REQUIRED + (("norm_sq",) if spec.overlay_norm else ())
    curve = read_curve(spec.input, required)
    fig, ax = new_axes()
    for field, label, style in SERIES:
        ax.plot(curve.t, curve.columns[field], label=label, **style)
    if spec.overlay_norm:
        ax.plot(curve.t, curve.columns["norm_sq"], label="norm$^2$ (QA)",
                linestyle="solid", color="tab:gray", linewidth=0.8)
    ax.set_xlabel("time  (units of $C^{-2/3}$)")
    ax.set_ylabel("population / photon number")
    ax.legend(loc="upper right")
    return save(fig, spec.output)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pbgsim-fig-two-photon",
        description="Plot a two-excitation run CSV "
        "(columns t,p_excited,n_defect,p_res_one,p_res_two)",
    )
    parser.add_argument("input", help="run.csv from the two-photon experiment")
    parser.add_argument("-o", "--out", default="two_photon.svg")
    parser.add_argument("--overlay-norm", action="store_true",
                        help="also draw the squared norm as a flat-line check")
    args = parser.parse_args(argv)
    spec = FigureSpec(input=Path(args.input), output=Path(args.out),
                      overlay_norm=args.overlay_norm)
    try:
        out = plot_two_photon(spec)
    except (SchemaError, OSError) as exc:
        print(f"pbgsim-fig-two-photon: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
