"""Command-line surface: extract, evaluate, sections, tag.

Exit codes: 0 success, 1 usage error, 2 data/environment error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .classifiers import extract_all
from .config import ENV_CONFIG_PATH, PipelineConfig, load_config
from .corpus import extractions_to_jsonl, read_report, scan_corpus, write_extractions
from .errors import ScoreExtractError
from .evaluation import (
    Task,
    evaluate,
    load_manifest,
    render_confusion_figure,
    render_table,
    report_to_json,
)
from .model import Report, ScoreExtraction
from .ner import tag_report
from .segmenter import segment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad arguments; we reserve 2 for data
    # errors, so surface them as UsageError instead.
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="score-extract",
        description="Parse free-text EEG reports into structured seizure/normality/epilepsy labels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    extract = sub.add_parser("extract", help="run the pipeline over a corpus directory")
    extract.add_argument("corpus_dir", help="directory of .txt reports (recursive)")
    extract.add_argument("--config", help=f"config file (default: ${ENV_CONFIG_PATH})")
    extract.add_argument("--out", help="output JSONL path (default: stdout)")
    extract.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")

    ev = sub.add_parser("evaluate", help="score pipeline output against a gold manifest")
    ev.add_argument("corpus_dir", help="directory the manifest paths are relative to")
    ev.add_argument("--manifest", required=True, help="CSV manifest: record_id,path,label")
    ev.add_argument("--task", required=True, choices=[t.value for t in Task])
    ev.add_argument("--config", help=f"config file (default: ${ENV_CONFIG_PATH})")
    fmt = ev.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit the report as JSON")
    fmt.add_argument("--table", action="store_true", help="emit the aligned text table (default)")
    ev.add_argument("--out", help="write the report here instead of stdout")
    ev.add_argument("--figure", help="also render a confusion-matrix heatmap to this image file")

    sections = sub.add_parser("sections", help="print the segmented view of one report")
    sections.add_argument("file", help="report file")
    sections.add_argument("--config", help=f"config file (default: ${ENV_CONFIG_PATH})")

    tag = sub.add_parser("tag", help="print entities (with negation flags) for one report")
    tag.add_argument("file", help="report file")
    tag.add_argument("--config", help=f"config file (default: ${ENV_CONFIG_PATH})")

    return parser


# Worker-side state for extract --workers; populated once per process.
_WORKER_CONFIG: PipelineConfig | None = None


def _init_worker(config: PipelineConfig) -> None:
    global _WORKER_CONFIG
    _WORKER_CONFIG = config


def _extract_one(report: Report) -> ScoreExtraction:
    config = _WORKER_CONFIG
    seg = segment(report, config.segmenter)
    entities = tag_report(seg, config.tagger, config.lexicons, config.negation)
    return extract_all(seg, entities, config.rules, config.negation)


def _run_extract(args) -> int:
    config = load_config(args.config)
    reports = scan_corpus(args.corpus_dir)
    if args.workers > 1 and len(reports) > 1:
        with ProcessPoolExecutor(
            max_workers=args.workers, initializer=_init_worker, initargs=(config,)
        ) as pool:
            results = list(pool.map(_extract_one, reports))
    else:
        _init_worker(config)
        results = [_extract_one(report) for report in reports]
    out = args.out or config.output_path
    if out:
        write_extractions(results, out)
        logger.info("wrote %d extractions to %s", len(results), out)
    else:
        sys.stdout.write(extractions_to_jsonl(results))
    return EXIT_OK


def _run_evaluate(args) -> int:
    config = load_config(args.config)
    manifest = load_manifest(args.manifest, Task(args.task))
    report = evaluate(args.corpus_dir, manifest, config)
    rendered = report_to_json(report) + "\n" if args.json else render_table(report)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    if args.figure:
        render_confusion_figure(report, args.figure)
    return EXIT_OK


def _run_sections(args) -> int:
    config = load_config(args.config)
    report = read_report(args.file)
    seg = segment(report, config.segmenter)
    text = report.text
    preamble = [s for s in seg.sentences if s.section_index is None]
    if preamble:
        print("[PREAMBLE]")
        for sentence in preamble:
            print(f"  {sentence.span.text_of(text)}")
    for index, section in enumerate(seg.sections):
        span = section.header
        print(f"[{section.section.display_name}] (chars {span.start}-{span.end})")
        for sentence in seg.sentences:
            if sentence.section_index == index:
                print(f"  {sentence.span.text_of(text)}")
    return EXIT_OK


def _run_tag(args) -> int:
    config = load_config(args.config)
    report = read_report(args.file)
    seg = segment(report, config.segmenter)
    entities = tag_report(seg, config.tagger, config.lexicons, config.negation)
    for e in entities:
        flags = "negated" if e.negated else "asserted"
        print(
            f"{e.span.start}:{e.span.end}\t{e.kind.value}\t{flags}\t"
            f"{e.section.display_name}\t{e.surface}\t({e.source.value})"
        )
    return EXIT_OK


_RUNNERS = {
    "extract": _run_extract,
    "evaluate": _run_evaluate,
    "sections": _run_sections,
    "tag": _run_tag,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"score-extract: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _RUNNERS[args.command](args)
    except ScoreExtractError as exc:
        print(f"score-extract: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"score-extract: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
