"""Command-line entry point: figure <kind> --in FILE [--in2 FILE] --out IMG."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .loader import ContractError
from .render import render
from .spec import FIGURE_KINDS, FigureSpec

EXIT_OK = 0
EXIT_CONTRACT = 2


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(part) for part in text.split(":"))
    except ValueError:
        raise ContractError(f"axis range must be LO:HI, got {text!r}") from None
    return lo, hi


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figure",
        description="Render nvlab output files to raster images",
    )
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="input_path", metavar="FILE", required=True,
                        help="primary input file")
    parser.add_argument("--in2", dest="input2_path", metavar="FILE",
                        help="kind-dependent companion input")
    parser.add_argument("--out", dest="output_path", metavar="IMG", required=True,
                        help="output image path (.png)")
    parser.add_argument("--xlim", metavar="LO:HI", help="x-axis range")
    parser.add_argument("--ylim", metavar="LO:HI", help="y-axis range")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            input_path=args.input_path,
            input2_path=args.input2_path,
            output_path=args.output_path,
            xlim=_parse_range(args.xlim) if args.xlim else None,
            ylim=_parse_range(args.ylim) if args.ylim else None,
        )
        out = render(spec)
    except ContractError as exc:
        print(f"figure: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    print(f"figure: wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
