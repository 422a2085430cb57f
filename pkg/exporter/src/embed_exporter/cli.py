"""Command-line entry point: hybridvec-export."""

import argparse
import logging
import sys
from pathlib import Path

from embed_exporter.encoder import POOLING_MODES, EncoderError
from embed_exporter.export import ExporterConfig, ExportError, export_vectors
from embed_exporter.reader import CorpusReadError
from embed_exporter.writer import VectorWriteError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridvec-export",
        description="Embed corpus facet sentences and write a HYBRIDVEC vector file.",
    )
    parser.add_argument("--corpus", required=True, help="corpus file (JSONL or CSV metadata)")
    parser.add_argument(
        "--format", default="jsonl", choices=("jsonl", "csv-metadata"), help="corpus layout"
    )
    parser.add_argument(
        "--sidecar-dir", default=None, help="directory holding fulltext files for csv-metadata"
    )
    parser.add_argument("--model", required=True, help="transformer model path or identifier")
    parser.add_argument("--pooling", default="cls", choices=POOLING_MODES)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--out", required=True, help="output vector file")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.batch_size < 1:
        print("error: --batch-size must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    config = ExporterConfig(
        corpus=Path(args.corpus),
        model=args.model,
        output=Path(args.out),
        pooling=args.pooling,
        batch_size=args.batch_size,
        corpus_format=args.format,
        sidecar_dir=Path(args.sidecar_dir) if args.sidecar_dir else None,
        device=args.device,
    )
    try:
        stats = export_vectors(config)
    except (CorpusReadError, ExportError, EncoderError, VectorWriteError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(
        f"exported {stats.documents} documents, {stats.sentences} sentences, "
        f"dimension {stats.dimension} -> {args.out}"
    )
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
