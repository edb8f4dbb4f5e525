"""CLI entry point: eeg-ner-service / python -m ner_service."""
from __future__ import annotations

import argparse
import json
import logging

from .config import BUILTIN_MODEL, DEFAULT_CHECKPOINT, ServiceConfig
from .app import serve


def main() -> None:
    parser = argparse.ArgumentParser(
        prog="eeg-ner-service",
        description="Serve clinical NER over the entity tagging wire protocol.",
    )
    parser.add_argument(
        "--model",
        default=DEFAULT_CHECKPOINT,
        help=f"checkpoint id or local path; use {BUILTIN_MODEL!r} for the deterministic matcher",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    parser.add_argument("--max-input-chars", type=int, default=4000)
    parser.add_argument("--chunk-overlap", type=int, default=200)
    parser.add_argument("--no-chunking", action="store_true", help="reject over-length inputs with 413")
    parser.add_argument("--label-map", help="JSON file mapping model labels to wire labels")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    kwargs = {}
    if args.label_map:
        with open(args.label_map, encoding="utf-8") as handle:
            kwargs["label_map"] = json.load(handle)
    config = ServiceConfig(
        model=args.model,
        host=args.host,
        port=args.port,
        max_input_chars=args.max_input_chars,
        chunk_overlap=args.chunk_overlap,
        chunking_enabled=not args.no_chunking,
        **kwargs,
    )
    serve(config)


if __name__ == "__main__":
    main()
