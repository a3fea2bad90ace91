"""Command-line entry point: render one figure from one CSV."""

from __future__ import annotations

import argparse
import sys

from .plotting import DEFAULT_ENERGY_CHANNELS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasecrystal-figures",
        description="Render figures from phasecrystal CSV output")
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render one figure")
    plot.add_argument("--kind", required=True,
                      choices=("energy", "difference", "density"))
    plot.add_argument("--csv", required=True, help="input CSV path")
    plot.add_argument("--out", required=True,
                      help="output image path (format from extension)")
    plot.add_argument("--channels", nargs="+",
                      default=list(DEFAULT_ENERGY_CHANNELS),
                      help="estimator channels to draw, e.g. pair_dm0")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(csv_path=args.csv, kind=args.kind, out_path=args.out,
                      channels=tuple(args.channels))
    out = render(spec)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
