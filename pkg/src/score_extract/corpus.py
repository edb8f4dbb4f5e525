"""Corpus loading and extraction persistence (JSONL)."""
from __future__ import annotations

import json
import logging
from pathlib import Path

from .errors import CorpusError
from .model import Report, ScoreExtraction, extraction_from_dict, extraction_to_dict

logger = logging.getLogger(__name__)


def read_report(path: str | Path, record_id: str | None = None) -> Report:
    """Read one plaintext report, replacing undecodable bytes (with a warning)."""
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        text = data.decode("utf-8", errors="replace")
        logger.warning("%s: invalid UTF-8 bytes replaced with U+FFFD", path)
    return Report(
        record_id=record_id if record_id is not None else path.stem,
        text=text,
        source_path=str(path),
    )


def scan_corpus(directory: str | Path) -> list[Report]:
    """Load every .txt file under ``directory`` (recursive), sorted by record id.

    Record ids are slash-separated paths relative to the corpus root with the
    suffix stripped. Unreadable files are skipped with a warning; only a
    corpus where every candidate file fails is an error.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"corpus directory not found: {directory}")
    paths = sorted(p for p in directory.rglob("*.txt") if p.is_file())
    reports: list[Report] = []
    failures: list[str] = []
    for path in paths:
        record_id = path.relative_to(directory).with_suffix("").as_posix()
        try:
            reports.append(read_report(path, record_id=record_id))
        except OSError as exc:
            failures.append(f"{path}: {exc}")
            logger.warning("skipping unreadable report %s: %s", path, exc)
    if paths and not reports:
        raise CorpusError(
            f"no readable .txt reports under {directory} ({len(failures)} failures)"
        )
    return reports


def write_extractions(results: list[ScoreExtraction], path: str | Path) -> None:
    """Write extractions as JSONL, one object per line, sorted by record_id."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write(extractions_to_jsonl(results))


def extractions_to_jsonl(results: list[ScoreExtraction]) -> str:
    lines = [
        json.dumps(extraction_to_dict(x), sort_keys=True, separators=(",", ":"))
        for x in sorted(results, key=lambda x: x.record_id)
    ]
    return "".join(line + "\n" for line in lines)


def read_extractions(path: str | Path) -> list[ScoreExtraction]:
    """Inverse of write_extractions."""
    results = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            results.append(extraction_from_dict(json.loads(line)))
    return results
