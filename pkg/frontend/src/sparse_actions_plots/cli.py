"""Script entry point: plot --in results.csv --kind heatmap --x t --y m --out phase.svg"""

from __future__ import annotations

import argparse
import sys

from .plots import KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a sweep result CSV as a heatmap or a family of curves.",
    )
    parser.add_argument("--in", dest="input", required=True, help="sweep result CSV")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--x", required=True, help="column for the x axis")
    parser.add_argument("--y", required=True, help="column for the y axis (curves: one line per value)")
    parser.add_argument("--value", default="recovery_rate", help="column to paint (default recovery_rate)")
    parser.add_argument("--out", required=True, help="output image, .svg or .png")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(input=args.input, kind=args.kind, x=args.x, y=args.y,
                    value=args.value, out=args.out)
    try:
        out = render(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
