#!/usr/bin/env python3
"""Regenerate protocol/fixtures/corpus_entities.json from the test corpus.

The recorded responses are the gazetteer tagger's output in wire form; the
remote-path tests replay them through a stub server. Rerun after changing
the bundled lexicons or the test corpus.
"""
from __future__ import annotations

import json
from pathlib import Path

from score_extract.corpus import scan_corpus
from score_extract.ner import default_lexicons, gazetteer_tag
from score_extract.segmenter import segment

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "tests" / "fixtures" / "corpus"
OUT = ROOT / "protocol" / "fixtures" / "corpus_entities.json"


def main() -> None:
    lexicons = default_lexicons()
    recorded = {}
    for report in scan_corpus(CORPUS):
        entities = gazetteer_tag(segment(report), lexicons)
        recorded[report.record_id] = {
            "text": report.text,
            "entities": [
                {"start": e.span.start, "end": e.span.end, "label": e.kind.value}
                for e in entities
            ],
        }
    OUT.write_text(json.dumps(recorded, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"recorded {len(recorded)} responses -> {OUT}")


if __name__ == "__main__":
    main()
