"""export-embeddings command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .exporter import ExportConfig, ModelLoadError, export_embeddings

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="export-embeddings",
        description="Extract per-occurrence contextual vectors for candidate words "
        "from a pre-trained masked language model.",
    )
    parser.add_argument("--corpus", required=True, help="corpus JSONL ({id, time, text} per line)")
    parser.add_argument("--words", required=True, help="candidates TSV (word in first column)")
    parser.add_argument("--model", required=True, help="model id or local checkpoint directory")
    parser.add_argument("--layer", type=int, default=-1, help="-1 last layer, 0 embeddings, i after layer i")
    parser.add_argument("--window-size", type=int, default=128)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--min-doc-tokens", type=int, default=3)
    parser.add_argument("--no-lang-filter", action="store_true")
    parser.add_argument("--out", required=True, help="output interchange JSONL")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    config = ExportConfig(
        model_id=args.model,
        layer=args.layer,
        window_size=args.window_size,
        batch_size=args.batch_size,
        device=args.device,
        min_doc_tokens=args.min_doc_tokens,
        lang_filter=not args.no_lang_filter,
    )
    try:
        summary = export_embeddings(args.corpus, args.words, config, args.out)
    except (ModelLoadError, ValueError) as exc:
        logger.error("%s", exc)
        return 1
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
