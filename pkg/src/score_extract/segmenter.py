"""Section segmentation: header detection, sentence splitting, attribution.

Headers follow the convention used by clinical EEG reports: a line-anchored
run of uppercase letters, digits, spaces, commas, slashes, or hyphens ending
in a colon ("CLINICAL HISTORY:"). The exact convention varies by site, so
the pattern, the alias table, and the abbreviation list are all overridable
through the config file (see config.py).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    CLINICAL_CORRELATION,
    CLINICAL_HISTORY,
    DESCRIPTION_OF_RECORD,
    IMPRESSION,
    INTRODUCTION,
    MEDICATIONS,
    CanonicalSection,
    Report,
    SectionSegment,
    SegmentedReport,
    Sentence,
    Span,
)

# Matched with re.MULTILINE; the whole match is the header including colon.
DEFAULT_HEADER_PATTERN = r"^[A-Z][A-Z0-9 ,/-]+:"

# Headers must contain at least this many uppercase letters, which keeps
# line-initial clock times ("12:30") and similar from becoming sections.
MIN_HEADER_LETTERS = 2

DEFAULT_ALIASES: dict[str, CanonicalSection] = {
    "HISTORY": CLINICAL_HISTORY,
    "CLINICAL HISTORY": CLINICAL_HISTORY,
    "IMPRESSION": IMPRESSION,
    "IMPRESSIONS": IMPRESSION,
    "CLINICAL IMPRESSIONS": IMPRESSION,
    "MEDICATIONS": MEDICATIONS,
    "CURRENT MEDICATIONS": MEDICATIONS,
    "DESCRIPTION OF THE RECORD": DESCRIPTION_OF_RECORD,
    "DESCRIPTION OF RECORD": DESCRIPTION_OF_RECORD,
    "CLINICAL CORRELATION": CLINICAL_CORRELATION,
    "CORRELATION": CLINICAL_CORRELATION,
    "INTRODUCTION": INTRODUCTION,
}

# Periods after these never end a sentence. Matched case-insensitively.
DEFAULT_ABBREVIATIONS = (
    "Dr.", "Mr.", "Mrs.", "vs.", "e.g.", "i.e.", "a.m.", "p.m.",
)

_BLANK_LINE = re.compile(r"\n[ \t\r]*\n")


@dataclass(frozen=True)
class SegmenterConfig:
    header_pattern: str = DEFAULT_HEADER_PATTERN
    min_header_letters: int = MIN_HEADER_LETTERS
    aliases: dict[str, CanonicalSection] = field(
        default_factory=lambda: dict(DEFAULT_ALIASES)
    )
    abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS

    def header_regex(self) -> re.Pattern[str]:
        return re.compile(self.header_pattern, re.MULTILINE)


DEFAULT_SEGMENTER = SegmenterConfig()


@dataclass(frozen=True, slots=True)
class HeaderMatch:
    """A matched section header; raw text ends at the colon, span covers it."""

    raw: str
    span: Span
    canonical: CanonicalSection


def canonicalize_header(raw: str, aliases: dict[str, CanonicalSection] | None = None) -> CanonicalSection:
    """Map a raw header (with or without colon) to its canonical section.

    Case-insensitive after uppercasing and internal-whitespace collapsing;
    unknown headers become OTHER carrying the normalized text.
    """
    if aliases is None:
        aliases = DEFAULT_ALIASES
    normalized = " ".join(raw.split()).rstrip(":").strip().upper()
    known = aliases.get(normalized)
    if known is not None:
        return known
    return CanonicalSection.other(normalized)


def find_headers(text: str, config: SegmenterConfig = DEFAULT_SEGMENTER) -> list[HeaderMatch]:
    """Find all section headers, non-overlapping and ordered by start."""
    matches: list[HeaderMatch] = []
    for m in config.header_regex().finditer(text):
        raw = m.group(0)
        if sum(1 for ch in raw if ch.isupper()) < config.min_header_letters:
            continue
        matches.append(
            HeaderMatch(
                raw=raw,
                span=Span(m.start(), m.end()),
                canonical=canonicalize_header(raw, config.aliases),
            )
        )
    return matches


def _is_abbreviation(text: str, dot: int, abbreviations: tuple[str, ...]) -> bool:
    for abbrev in abbreviations:
        n = len(abbrev)
        if dot + 1 < n:
            continue
        candidate = text[dot + 1 - n : dot + 1]
        if candidate.lower() != abbrev.lower():
            continue
        before = dot - n
        if before < 0 or not text[before].isalnum():
            return True
    return False


def _is_initial(text: str, dot: int) -> bool:
    # Single capital letter + period ("J. Smith"), with a boundary before it.
    if dot < 1:
        return False
    ch = text[dot - 1]
    if not (ch.isalpha() and ch.isupper()):
        return False
    return dot - 2 < 0 or not text[dot - 2].isalnum()


def _terminates(text: str, pos: int, abbreviations: tuple[str, ...]) -> bool:
    """True when the punctuation at pos ends a sentence."""
    ch = text[pos]
    after = text[pos + 1 :]
    stripped = after.lstrip()
    if stripped:
        # Needs whitespace, then an uppercase letter or digit.
        if not after[0].isspace():
            return False
        nxt = stripped[0]
        if not (nxt.isdigit() or (nxt.isalpha() and nxt.isupper())):
            return False
    # else: end of text (possibly after trailing whitespace) always closes.
    if ch == ".":
        if pos > 0 and pos + 1 < len(text) and text[pos - 1].isdigit() and text[pos + 1].isdigit():
            return False  # decimal point
        if _is_abbreviation(text, pos, abbreviations):
            return False
        if _is_initial(text, pos):
            return False
    return True


def split_sentences(
    text: str,
    within: Span | None = None,
    config: SegmenterConfig = DEFAULT_SEGMENTER,
) -> list[Span]:
    """Split ``within`` (default: all of text) into ordered sentence spans.

    Spans are trimmed to non-whitespace and jointly cover every
    non-whitespace character of the window.
    """
    if within is None:
        if not text.strip():
            return []
        within = Span(0, len(text))
    sub = within.text_of(text)

    cuts: list[int] = []
    for i, ch in enumerate(sub):
        if ch in ".!?" and _terminates(sub, i, config.abbreviations):
            cuts.append(i + 1)
    for m in _BLANK_LINE.finditer(sub):
        cuts.append(m.start() + 1)
    cuts = sorted(set(cuts))

    spans: list[Span] = []
    prev = 0
    for cut in cuts + [len(sub)]:
        chunk = sub[prev:cut]
        lead = len(chunk) - len(chunk.lstrip())
        trail = len(chunk) - len(chunk.rstrip())
        if chunk.strip():
            spans.append(
                Span(within.start + prev + lead, within.start + cut - trail)
            )
        prev = cut
    return spans


def segment(report: Report, config: SegmenterConfig = DEFAULT_SEGMENTER) -> SegmentedReport:
    """Segment a report into sections and section-attributed sentences.

    Bodies are exactly the gaps between consecutive headers (the last body
    runs to end of text), so headers + bodies + preamble reconstruct the
    full text with no character lost or duplicated.
    """
    text = report.text
    headers = find_headers(text, config)

    sections: list[SectionSegment] = []
    for i, header in enumerate(headers):
        body_start = header.span.end
        body_end = headers[i + 1].span.start if i + 1 < len(headers) else len(text)
        body = Span(body_start, body_end) if body_end > body_start else None
        sections.append(SectionSegment(header.canonical, header.span, body))

    sentences: list[Sentence] = []
    preamble_end = headers[0].span.start if headers else len(text)
    if preamble_end > 0:
        for span in split_sentences(text, Span(0, preamble_end), config):
            sentences.append(Sentence(span, None))
    for index, section in enumerate(sections):
        if section.body is None:
            continue
        for span in split_sentences(text, section.body, config):
            sentences.append(Sentence(span, index))

    return SegmentedReport(
        report=report, sections=tuple(sections), sentences=tuple(sentences)
    )
