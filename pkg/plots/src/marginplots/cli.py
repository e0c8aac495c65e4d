"""One subcommand per figure kind. Inputs are `--input [label=]path` flags;
labels default to the run directory's algorithm name when available.
"""

from __future__ import annotations

import argparse
import sys

from .errors import MarginPlotsError
from .render import KINDS, PENALTY_COLUMNS, PlotSpec, render


def _parse_input(value: str) -> tuple[str, str]:
    label, sep, path = value.partition("=")
    if sep:
        return label, path
    return "", value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marginplots")
    sub = parser.add_subparsers(dest="kind", required=True)
    help_by_kind = {
        "margins": "overlaid sorted-margin curves from margins.csv files",
        "errors": "train/test error traces from errors.csv files",
        "penalty": "penalty curves from penalty.csv files (log y by default)",
        "staged": "per-stage margin overlays from staged_margins.csv files",
        "histogram": "prediction histogram from one histogram.csv file",
    }
    for kind in KINDS:
        p = sub.add_parser(kind, help=help_by_kind[kind])
        p.add_argument(
            "--input",
            action="append",
            required=True,
            metavar="[LABEL=]PATH",
            help="input CSV; repeat for one curve per model",
        )
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--xlabel", default="")
        p.add_argument("--ylabel", default="")
        p.add_argument("--title", default="")
        if kind == "penalty":
            p.add_argument("--column", choices=PENALTY_COLUMNS, default="capital_N")
            p.add_argument("--linear-y", action="store_true", help="disable the log scale")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        kind=args.kind,
        inputs=tuple(_parse_input(v) for v in args.input),
        output=args.out,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        title=args.title,
        log_y=False if getattr(args, "linear_y", False) else None,
        penalty_column=getattr(args, "column", "capital_N"),
    )
    try:
        render(spec)
    except MarginPlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
