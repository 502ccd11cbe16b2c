"""Command-line front end.

Each subcommand runs one analysis pipeline against the files named in a
key=value config, then writes CSV or JSON-lines tables to --out (or
CSV to stdout when --out is omitted). Exit codes: 0 on success, 2 for
input problems, 3 for internal invariant violations.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import RunConfig, load_config
from .errors import InputError, InvariantError
from .formats import REPORT_FORMATS, emit_report, render_cell
from .pipelines import PIPELINES, report_pipeline


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--epsilon", type=float, help="override the ball tolerance")
    common.add_argument("--out", help="output file (one table) or directory (several)")
    common.add_argument(
        "--format",
        choices=REPORT_FORMATS,
        default="csv",
        help="report format (default csv)",
    )
    parser = argparse.ArgumentParser(
        prog="wordspace",
        description="Geometry of contextualized word embedding clouds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "meb": "enclosing-ball radii per word cohort",
        "probe-identity": "word-identity probe error rates, binned",
        "probe-context": "context-retrieval probe error rates",
        "distortion": "cosine-to-human calibration and residual analysis",
        "geo": "region radii, GDP correlation, similarity counts",
        "theory-check": "Monte Carlo check of cosine-distance bounds",
        "report": "run every pipeline with configured inputs",
    }
    for name, desc in descriptions.items():
        sub.add_parser(name, parents=[common], help=desc, description=desc)
    return parser


def _print_tables(tables) -> None:
    for table in tables:
        print(f"# table {table.name}")
        print(",".join(table.columns))
        for row in table.rows:
            print(",".join(render_cell(v) for v in row))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else RunConfig()
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.epsilon is not None:
            overrides["epsilon"] = args.epsilon
        if overrides:
            config = dataclasses.replace(config, **overrides).validate()
        pipeline = report_pipeline if args.command == "report" else PIPELINES[args.command]
        tables = pipeline(config)
        if args.out is None:
            _print_tables(tables)
        else:
            for path in emit_report(tables, args.out, args.format):
                print(path)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
