"""Command line entry point.

  plotkit plot --raw RAW.csv [--group arm|chosen] [--bins N] --out DIR

Writes ``<scenario>-<group>.svg`` under ``--out``.  Exit codes: 0 on
success, 2 on a validation problem, 3 on an I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import PlotKitError
from .figures import FigureSpec, render_histograms
from .io import read_raw


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    plot = subs.add_parser("plot", help="histogram figure from a raw CSV")
    plot.add_argument("--raw", required=True, help="raw CSV written by the simulation harness")
    plot.add_argument("--group", choices=("arm", "chosen"), default="arm")
    plot.add_argument("--bins", type=int, default=40)
    plot.add_argument("--out", required=True, help="output directory")
    plot.set_defaults(func=_cmd_plot)
    return parser


def _cmd_plot(args) -> int:
    scenario = read_raw(args.raw).scenario
    os.makedirs(args.out, exist_ok=True)
    spec = FigureSpec(
        raw_paths=(args.raw,),
        out_path=os.path.join(args.out, f"{scenario}-{args.group}.svg"),
        group=args.group,
        bins=args.bins,
    )
    result = render_histograms(spec)
    for p in result.panels:
        se = "n/a" if p.std_err is None else f"{p.std_err:.3g}"
        print(f"{p.label}: bias {p.bias:+.6g} (se {se}, n={p.n})")
    print(f"wrote {result.path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlotKitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
