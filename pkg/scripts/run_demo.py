"""Run every analysis pipeline against a generated fixture directory.

Expects the layout written by make_fixtures.py and drives the same code
paths as the command-line tool: the full report against demo.cfg, then
the context-retrieval probe against context.cfg. Prints a one-line
summary per emitted table.
"""

import argparse
from pathlib import Path

from wordspace.cli import main as cli_main
from wordspace.formats import read_report_csv


def summarize(directory: Path) -> None:
    for path in sorted(directory.glob("*.csv")):
        table = read_report_csv(path)
        print(f"  {table.name}: {len(table.rows)} rows x {len(table.columns)} cols")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fixtures", default="fixtures", help="fixture directory")
    parser.add_argument("--out", default="reports", help="report output directory")
    args = parser.parse_args(argv)

    fixtures = Path(args.fixtures)
    out = Path(args.out)
    for cfg in ("demo.cfg", "context.cfg"):
        if not (fixtures / cfg).exists():
            parser.error(f"{fixtures / cfg} not found; run make_fixtures.py first")

    rc = cli_main(
        ["report", "--config", str(fixtures / "demo.cfg"), "--out", str(out / "main")]
    )
    if rc != 0:
        return rc
    print("main report:")
    summarize(out / "main")

    rc = cli_main(
        [
            "probe-context",
            "--config",
            str(fixtures / "context.cfg"),
            "--out",
            str(out / "context"),
        ]
    )
    if rc != 0:
        return rc
    print("context report:")
    summarize(out / "context")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
