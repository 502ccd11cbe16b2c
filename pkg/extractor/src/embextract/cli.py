"""Command line entry point: extract keyword embeddings to an EMB1 file."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ExtractionError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embextract",
        description=(
            "Extract per-occurrence keyword embeddings from a masked"
            " language model into an EMB1 file."
        ),
    )
    parser.add_argument(
        "--model",
        required=True,
        help="model name or directory readable by the transformers loaders",
    )
    parser.add_argument(
        "--corpus",
        required=True,
        type=Path,
        help="UTF-8 text file with one sentence per line",
    )
    parser.add_argument(
        "--keywords",
        required=True,
        type=Path,
        help="text file with one keyword per line",
    )
    parser.add_argument(
        "--out", required=True, type=Path, help="output embedding file"
    )
    parser.add_argument(
        "--mask-mode",
        action="store_true",
        help="encode each occurrence with its subwords replaced by one mask token",
    )
    parser.add_argument(
        "--batch-size",
        type=int,
        default=16,
        help="sequences per forward pass (default 16)",
    )
    parser.add_argument(
        "--min-chars",
        type=int,
        default=20,
        help="drop sentences shorter than this many characters (default 20)",
    )
    parser.add_argument(
        "--max-chars",
        type=int,
        default=512,
        help="drop sentences longer than this many characters (default 512)",
    )
    parser.add_argument(
        "--source",
        default=None,
        help="source tag stored with each record, at most 16 bytes"
        " (default: model name tail)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .extract import ExtractionJob, extract, read_keywords

    try:
        job = ExtractionJob(
            model=args.model,
            corpus_path=args.corpus,
            keywords=read_keywords(args.keywords),
            out_path=args.out,
            mask_mode=args.mask_mode,
            batch_size=args.batch_size,
            min_chars=args.min_chars,
            max_chars=args.max_chars,
            source=args.source,
        )
        summary = extract(job)
    except (ExtractionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"sentences: {summary.sentences}"
        f" (skipped: {summary.skipped_short} short,"
        f" {summary.skipped_long} long,"
        f" {summary.skipped_over_limit} over token limit)"
    )
    for keyword, count in summary.records_by_keyword.items():
        print(f"  {keyword}: {count}")
    print(f"wrote {summary.records} records to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
