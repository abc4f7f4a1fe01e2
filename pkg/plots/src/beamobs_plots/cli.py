"""plot-error command: one diagnostic series from a trajectory CSV to an image."""

from __future__ import annotations

import argparse
import sys

from .core import EmptyDataError, MissingColumnError, PlotSpec, plot_error


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-error",
        description="Plot a diagnostic column of a trajectory CSV against time",
    )
    parser.add_argument("csv", help="trajectory CSV file")
    parser.add_argument("--series", default="err_weighted",
                        help="column to plot (err_weighted, lyapunov, errmode_N, ...)")
    parser.add_argument("--out", required=True, help="output image path (.png / .svg)")
    parser.add_argument("--xlabel", default="t [s]")
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(csv_path=args.csv, series=args.series, out_path=args.out,
                    xlabel=args.xlabel, ylabel=args.ylabel, title=args.title)
    try:
        count = plot_error(None, spec)
    except (MissingColumnError, EmptyDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"plotted {count} points from {args.csv} to {args.out}")
    return 0


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
