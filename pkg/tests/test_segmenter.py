from __future__ import annotations

import random

from hypothesis import given
from hypothesis import strategies as st

from score_extract.model import (
    CLINICAL_CORRELATION,
    CLINICAL_HISTORY,
    IMPRESSION,
    CanonicalSection,
    Report,
    Span,
)
from score_extract.segmenter import (
    DEFAULT_ALIASES,
    SegmenterConfig,
    canonicalize_header,
    find_headers,
    segment,
    split_sentences,
)


class TestFindHeaders:
    def test_single_header(self):
        text = "CLINICAL HISTORY: 54 year old male."
        matches = find_headers(text)
        assert len(matches) == 1
        assert matches[0].raw == "CLINICAL HISTORY:"
        assert matches[0].span == Span(0, 17)
        assert matches[0].canonical == CLINICAL_HISTORY

    def test_empty_text(self):
        assert find_headers("") == []

    def test_two_headers_in_order(self):
        text = "IMPRESSION: Abnormal EEG.\nCLINICAL CORRELATION: None needed."
        matches = find_headers(text)
        assert [m.canonical for m in matches] == [IMPRESSION, CLINICAL_CORRELATION]
        assert matches[0].span.start < matches[1].span.start
        assert matches[1].raw == "CLINICAL CORRELATION:"

    def test_headers_only_at_line_start(self):
        text = "The study IMPRESSION: is referenced mid-sentence."
        assert find_headers(text) == []

    def test_clock_times_are_not_headers(self):
        assert find_headers("12:30 the recording began.") == []

    def test_unknown_header_becomes_other(self):
        matches = find_headers("REFERRING PHYSICIAN: Dr. Smith.")
        assert len(matches) == 1
        assert matches[0].canonical == CanonicalSection.other("REFERRING PHYSICIAN")

    def test_custom_pattern_via_config(self):
        config = SegmenterConfig(header_pattern=r"^== [A-Z ]+ ==", min_header_letters=2)
        matches = find_headers("== HISTORY ==\ntext", config)
        assert len(matches) == 1
        assert matches[0].raw == "== HISTORY =="


class TestCanonicalize:
    def test_alias_table(self):
        for raw, expect in DEFAULT_ALIASES.items():
            assert canonicalize_header(raw + ":") == expect

    def test_case_and_whitespace_insensitive(self):
        assert canonicalize_header("clinical  impressions:") == IMPRESSION
        assert canonicalize_header("History") == CLINICAL_HISTORY


class TestSplitSentences:
    def test_two_sentences(self):
        text = "Normal EEG. No seizures seen."
        spans = split_sentences(text)
        assert [s.text_of(text) for s in spans] == ["Normal EEG.", "No seizures seen."]

    def test_decimal_does_not_split(self):
        text = "A 5.5 Hz rhythm was seen."
        spans = split_sentences(text)
        assert [s.text_of(text) for s in spans] == [text]

    def test_empty(self):
        assert split_sentences("") == []

    def test_abbreviations_do_not_split(self):
        text = "Seen by Dr. Smith at 5 p.m. The study was normal."
        spans = split_sentences(text)
        assert [s.text_of(text) for s in spans] == [text]

    def test_initials_do_not_split(self):
        text = "Reviewed with J. Smith. Findings below."
        spans = split_sentences(text)
        assert [s.text_of(text) for s in spans] == [
            "Reviewed with J. Smith.",
            "Findings below.",
        ]

    def test_lowercase_continuation_does_not_split(self):
        text = "The value was 5. mg were given."
        spans = split_sentences(text)
        assert len(spans) == 1

    def test_blank_line_terminates(self):
        text = "First clause without punctuation\n\nSecond paragraph."
        spans = split_sentences(text)
        assert [s.text_of(text) for s in spans] == [
            "First clause without punctuation",
            "Second paragraph.",
        ]

    def test_question_and_bang(self):
        text = "Was it ictal? Yes! Read on."
        spans = split_sentences(text)
        assert [s.text_of(text) for s in spans] == ["Was it ictal?", "Yes!", "Read on."]

    def test_spans_cover_all_non_whitespace(self):
        text = "  One. Two!  Three?  "
        spans = split_sentences(text)
        covered = set()
        for span in spans:
            covered.update(range(span.start, span.end))
        for i, ch in enumerate(text):
            if not ch.isspace():
                assert i in covered


class TestSegment:
    def test_two_section_report(self):
        text = "IMPRESSION: Abnormal EEG.\nCLINICAL CORRELATION: None needed."
        seg = segment(Report("r", text))
        assert [s.section for s in seg.sections] == [IMPRESSION, CLINICAL_CORRELATION]
        sentences = [(s.span.text_of(text), s.section_index) for s in seg.sentences]
        assert sentences == [("Abnormal EEG.", 0), ("None needed.", 1)]

    def test_headerless_report(self):
        seg = segment(Report("r", "Routine study."))
        assert seg.sections == ()
        assert len(seg.sentences) == 1
        assert seg.sentences[0].section_index is None

    def test_preamble_before_first_header(self):
        text = "Recorded 2019.\nIMPRESSION: Normal EEG."
        seg = segment(Report("r", text))
        assert seg.sentences[0].section_index is None
        assert seg.sentences[1].section_index == 0

    def test_header_at_end_has_no_body(self):
        seg = segment(Report("r", "IMPRESSION:"))
        assert len(seg.sections) == 1
        assert seg.sections[0].body is None
        assert seg.sentences == ()

    def test_bodies_are_disjoint_and_ordered(self):
        text = (
            "CLINICAL HISTORY: One.\nMEDICATIONS: Two.\n"
            "IMPRESSION: Three.\nCLINICAL CORRELATION: Four."
        )
        seg = segment(Report("r", text))
        bodies = [s.body for s in seg.sections if s.body is not None]
        for a, b in zip(bodies, bodies[1:]):
            assert a.end <= b.start

    def test_sentences_lie_within_their_section_bodies(self):
        text = "CLINICAL HISTORY: One. Two.\nIMPRESSION: Three."
        seg = segment(Report("r", text))
        for sentence in seg.sentences:
            assert sentence.section_index is not None
            body = seg.sections[sentence.section_index].body
            assert body.contains(sentence.span)


def reconstruct(seg, text: str) -> str:
    """Rebuild the text from preamble + header spans + body spans."""
    first = seg.sections[0].header.start if seg.sections else len(text)
    pieces = [text[:first]]
    for section in seg.sections:
        pieces.append(section.header.text_of(text))
        if section.body is not None:
            pieces.append(section.body.text_of(text))
    return "".join(pieces)


@given(st.text(max_size=400))
def test_coverage_holds_for_arbitrary_text(text):
    seg = segment(Report("r", text if text else " "))
    assert reconstruct(seg, seg.report.text) == seg.report.text


HEADER_POOL = list(DEFAULT_ALIASES) + ["TECHNICAL DIFFICULTIES", "HEART RATE", "EEG/VIDEO"]
WORD_POOL = (
    "the patient was seen with a 9.5 Hz rhythm and no events e.g. spikes "
    "Dr. Jones noted p.m. findings vs. prior study J. Doe agreed"
).split()


def random_report_text(rng: random.Random) -> str:
    parts = []
    if rng.random() < 0.3:
        parts.append(" ".join(rng.choices(WORD_POOL, k=rng.randint(1, 8))) + ".\n")
    for _ in range(rng.randint(0, 6)):
        parts.append(rng.choice(HEADER_POOL) + ":")
        for _ in range(rng.randint(0, 4)):
            sep = rng.choice([" ", " ", "\n", "\n\n"])
            words = " ".join(rng.choices(WORD_POOL, k=rng.randint(1, 12)))
            parts.append(sep + words + rng.choice([".", "?", "!", ""]))
        parts.append("\n")
    return "".join(parts)


def test_coverage_on_randomized_synthetic_reports():
    rng = random.Random(20240817)
    for _ in range(500):
        text = random_report_text(rng) or " "
        seg = segment(Report("r", text))
        assert reconstruct(seg, text) == text


def test_segment_is_deterministic():
    text = random_report_text(random.Random(7))
    a = segment(Report("r", text or " "))
    b = segment(Report("r", text or " "))
    assert a == b
