"""Shared data model: reports, spans, sections, entities, labels, extractions.

All types are immutable after construction and safe to share across workers.
Offsets everywhere are character offsets (Unicode code points), never bytes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class Span:
    """Half-open character interval [start, end) into some owning text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.start >= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: Span) -> bool:
        return self.start < other.end and other.start < self.end

    def text_of(self, text: str) -> str:
        return text[self.start : self.end]


@dataclass(frozen=True, slots=True)
class Report:
    """One plaintext report, the unit of all processing."""

    record_id: str
    text: str
    source_path: str | None = None

    def __post_init__(self) -> None:
        if not self.record_id:
            raise ValueError("record_id must be non-empty")


class SectionKind(enum.Enum):
    CLINICAL_HISTORY = "clinical_history"
    MEDICATIONS = "medications"
    INTRODUCTION = "introduction"
    DESCRIPTION_OF_RECORD = "description_of_record"
    IMPRESSION = "impression"
    CLINICAL_CORRELATION = "clinical_correlation"
    OTHER = "other"


@dataclass(frozen=True, slots=True)
class CanonicalSection:
    """A canonicalized section identity.

    ``raw`` is set only for OTHER and holds the uppercased header with the
    trailing colon stripped (internal whitespace collapsed).
    """

    kind: SectionKind
    raw: str = ""

    def __post_init__(self) -> None:
        if self.kind is SectionKind.OTHER and not self.raw:
            raise ValueError("OTHER sections must carry the raw header")
        if self.kind is not SectionKind.OTHER and self.raw:
            raise ValueError("raw header is only meaningful for OTHER sections")

    @property
    def display_name(self) -> str:
        if self.kind is SectionKind.OTHER:
            return self.raw
        return self.kind.value.replace("_", " ").upper()

    @staticmethod
    def other(raw_header: str) -> CanonicalSection:
        normalized = " ".join(raw_header.split()).rstrip(":").strip().upper()
        return CanonicalSection(SectionKind.OTHER, normalized)


CLINICAL_HISTORY = CanonicalSection(SectionKind.CLINICAL_HISTORY)
MEDICATIONS = CanonicalSection(SectionKind.MEDICATIONS)
INTRODUCTION = CanonicalSection(SectionKind.INTRODUCTION)
DESCRIPTION_OF_RECORD = CanonicalSection(SectionKind.DESCRIPTION_OF_RECORD)
IMPRESSION = CanonicalSection(SectionKind.IMPRESSION)
CLINICAL_CORRELATION = CanonicalSection(SectionKind.CLINICAL_CORRELATION)
PREAMBLE = CanonicalSection.other("PREAMBLE")


@dataclass(frozen=True, slots=True)
class SectionSegment:
    """One detected section: its identity, header span, and body span.

    ``body`` is None when the header is immediately followed by the next
    header (or end of text) and the section has no content at all.
    """

    section: CanonicalSection
    header: Span
    body: Span | None


@dataclass(frozen=True, slots=True)
class Sentence:
    """A sentence span plus the index of its owning section (None = preamble)."""

    span: Span
    section_index: int | None


@dataclass(frozen=True, slots=True)
class SegmentedReport:
    """A report with its section map and sentence inventory.

    Invariants (established by the segmenter, checked by its tests):
    section bodies are disjoint and ordered; every sentence lies entirely
    within one section body or within the preamble before the first header.
    """

    report: Report
    sections: tuple[SectionSegment, ...]
    sentences: tuple[Sentence, ...]

    def section_of(self, sentence: Sentence) -> CanonicalSection:
        if sentence.section_index is None:
            return PREAMBLE
        return self.sections[sentence.section_index].section

    def sentence_containing(self, span: Span) -> Sentence | None:
        for sentence in self.sentences:
            if sentence.span.contains(span):
                return sentence
        return None

    def sentences_in(self, section: CanonicalSection) -> tuple[Sentence, ...]:
        return tuple(
            s for s in self.sentences if self.section_of(s) == section
        )

    def has_section(self, section: CanonicalSection) -> bool:
        return any(seg.section == section for seg in self.sections)


class EntityKind(enum.Enum):
    PROBLEM = "problem"
    TEST = "test"
    TREATMENT = "treatment"
    MEDICATION_NAME = "drug"
    MEDICATION_DOSE = "dose"
    MEDICATION_FREQUENCY = "frequency"
    MEDICATION_DURATION = "duration"
    MEDICATION_REASON = "reason"


class EntitySource(enum.Enum):
    GAZETTEER = "gazetteer"
    REMOTE = "remote"


@dataclass(frozen=True, slots=True)
class Entity:
    """A typed text span with section attribution and negation flag."""

    kind: EntityKind
    span: Span
    surface: str
    section: CanonicalSection
    negated: bool
    source: EntitySource


class SeizureTypeLabel(enum.Enum):
    ABSENCE = "absence"
    COMPLEX_PARTIAL = "complex_partial"
    SIMPLE_PARTIAL = "simple_partial"
    MYOCLONIC = "myoclonic"
    TONIC_CLONIC = "tonic_clonic"
    NONE = "none"


class NormalityLabel(enum.Enum):
    NORMAL = "normal"
    ABNORMAL = "abnormal"


class EpilepsyLabel(enum.Enum):
    EPILEPSY = "epilepsy"
    NO_EPILEPSY = "no_epilepsy"


# Task keys used in serialized evidence and CLI output.
TASK_SEIZURE = "seizure_type"
TASK_NORMALITY = "normality"
TASK_EPILEPSY = "epilepsy"
TASKS = (TASK_SEIZURE, TASK_NORMALITY, TASK_EPILEPSY)

FALLBACK_PREFIX = "fallback:"


@dataclass(frozen=True, slots=True)
class Evidence:
    """One justification item for a task decision.

    ``span`` is None exactly for fallback decisions, which carry no
    supporting text; their rule name starts with ``fallback:``.
    """

    task: str
    rule: str
    span: Span | None = None
    text: str = ""


@dataclass(frozen=True, slots=True)
class ScoreExtraction:
    """The structured output for one report."""

    record_id: str
    seizure_type: SeizureTypeLabel
    normality: NormalityLabel
    epilepsy: EpilepsyLabel
    evidence: tuple[Evidence, ...] = field(default_factory=tuple)

    def evidence_for(self, task: str) -> tuple[Evidence, ...]:
        return tuple(e for e in self.evidence if e.task == task)


def validate_extraction(extraction: ScoreExtraction) -> list[str]:
    """Return invariant violations as human-readable strings (empty = valid).

    Violations are data, not errors: callers decide whether to reject.
    """
    violations: list[str] = []
    if not extraction.record_id:
        violations.append("record_id is empty")
    for task in TASKS:
        items = extraction.evidence_for(task)
        if not items:
            violations.append(f"{task}: no evidence entry (not even a fallback)")
            continue
        for item in items:
            if not item.rule:
                violations.append(f"{task}: evidence entry has an empty rule name")
            if item.span is None and not item.rule.startswith(FALLBACK_PREFIX):
                violations.append(
                    f"{task}: span-less evidence from non-fallback rule {item.rule!r}"
                )
            if item.span is not None and item.rule.startswith(FALLBACK_PREFIX):
                violations.append(
                    f"{task}: fallback rule {item.rule!r} carries an evidence span"
                )
    for task in (t for t in {e.task for e in extraction.evidence} if t not in TASKS):
        violations.append(f"unknown evidence task {task!r}")
    return violations


# Sentinel offsets for span-less (fallback) evidence in the JSONL schema.
_NO_SPAN = -1


def extraction_to_dict(extraction: ScoreExtraction) -> dict:
    """Encode an extraction as the flat JSONL object schema."""
    return {
        "record_id": extraction.record_id,
        "seizure_type": extraction.seizure_type.value,
        "normality": extraction.normality.value,
        "epilepsy": extraction.epilepsy.value,
        "evidence": [
            {
                "task": e.task,
                "rule": e.rule,
                "start": e.span.start if e.span is not None else _NO_SPAN,
                "end": e.span.end if e.span is not None else _NO_SPAN,
                "text": e.text,
            }
            for e in extraction.evidence
        ],
    }


def extraction_from_dict(payload: dict) -> ScoreExtraction:
    """Decode an extraction from the JSONL object schema (round-trip inverse)."""
    evidence = tuple(
        Evidence(
            task=item["task"],
            rule=item["rule"],
            span=None
            if item["start"] == _NO_SPAN
            else Span(item["start"], item["end"]),
            text=item["text"],
        )
        for item in payload["evidence"]
    )
    return ScoreExtraction(
        record_id=payload["record_id"],
        seizure_type=SeizureTypeLabel(payload["seizure_type"]),
        normality=NormalityLabel(payload["normality"]),
        epilepsy=EpilepsyLabel(payload["epilepsy"]),
        evidence=evidence,
    )
