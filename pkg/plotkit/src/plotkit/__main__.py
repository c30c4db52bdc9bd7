"""Script entry point: render a sweep CSV or a Rabi-demo JSON record.

    python -m plotkit sweep  <input.csv>  <output.svg> [--title ...]
    python -m plotkit rabi   <input.json> <output.svg>
"""
import argparse
import sys

from .render import PlotSpec, SchemaMismatch, render, render_rabi_report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="render a Fig-1 style sweep figure")
    sweep.add_argument("input_csv")
    sweep.add_argument("output_svg")
    sweep.add_argument("--title", default="Information rate vs coupling")
    sweep.add_argument("--linear-x", action="store_true")

    rabi = sub.add_parser("rabi", help="render the driven-qubit bar report")
    rabi.add_argument("input_json")
    rabi.add_argument("output_svg")

    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            render(
                PlotSpec(
                    input_path=args.input_csv,
                    output_path=args.output_svg,
                    log_x=not args.linear_x,
                    title=args.title,
                )
            )
        else:
            render_rabi_report(args.input_json, args.output_svg)
    except SchemaMismatch as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
