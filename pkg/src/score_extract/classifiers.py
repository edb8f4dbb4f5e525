"""Rule classifiers mapping a segmented report + entities to task labels.

Three rules, each returning a label and a trace of what fired:

* epilepsy     — non-negated problem entities in CLINICAL HISTORY matched
                 against the epilepsy lexicon (token containment allowed).
* normality    — "abnormal"/"normal" term ladder over the IMPRESSION
                 section, then the whole document, then a conservative
                 abnormal default.
* seizure type — per-type phrase counts over IMPRESSION, DESCRIPTION OF
                 THE RECORD, and CLINICAL CORRELATION (whole document as
                 fallback), ties broken by a fixed precedence.

All rules consume non-negated mentions only; negated mentions assert
absence and never support a positive decision.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    CLINICAL_CORRELATION,
    CLINICAL_HISTORY,
    DESCRIPTION_OF_RECORD,
    IMPRESSION,
    TASK_EPILEPSY,
    TASK_NORMALITY,
    TASK_SEIZURE,
    Entity,
    EntityKind,
    EpilepsyLabel,
    Evidence,
    NormalityLabel,
    ScoreExtraction,
    SegmentedReport,
    SeizureTypeLabel,
    Sentence,
    Span,
)
from .ner import (
    DEFAULT_NEGATION,
    Lexicon,
    NegationConfig,
    detect_negation,
    find_phrase_matches,
    phrase_tokens,
)

DEFAULT_EPILEPSY_TERMS = (
    "epilepsy",
    "seizure disorder",
    "epileptic",
    "epilepsia partialis continua",
)

DEFAULT_SEIZURE_TERMS: dict[SeizureTypeLabel, tuple[str, ...]] = {
    SeizureTypeLabel.ABSENCE: ("absence seizure", "absence seizures", "petit mal"),
    SeizureTypeLabel.COMPLEX_PARTIAL: ("complex partial",),
    SeizureTypeLabel.SIMPLE_PARTIAL: ("simple partial",),
    SeizureTypeLabel.MYOCLONIC: (
        "myoclonic seizure",
        "myoclonic seizures",
        "myoclonus with seizure",
    ),
    SeizureTypeLabel.TONIC_CLONIC: (
        "tonic-clonic",
        "tonic clonic",
        "grand mal",
        "generalized tonic-clonic",
        "GTC seizure",
    ),
}

# Tie-break order, most severe/specific first.
DEFAULT_SEIZURE_PRECEDENCE = (
    SeizureTypeLabel.TONIC_CLONIC,
    SeizureTypeLabel.COMPLEX_PARTIAL,
    SeizureTypeLabel.ABSENCE,
    SeizureTypeLabel.MYOCLONIC,
    SeizureTypeLabel.SIMPLE_PARTIAL,
)

DEFAULT_ABNORMAL_TERMS = ("abnormal", "abnormality", "abnormalities")
DEFAULT_NORMAL_TERMS = ("normal", "within normal limits")

SEIZURE_SCAN_SECTIONS = (IMPRESSION, DESCRIPTION_OF_RECORD, CLINICAL_CORRELATION)


def _term_lexicon(name: str, terms: tuple[str, ...]) -> Lexicon:
    return Lexicon.from_terms(name, EntityKind.PROBLEM, terms)


@dataclass(frozen=True)
class RuleSet:
    """Term lists and tie-break order consumed by the three classifiers."""

    epilepsy_terms: tuple[str, ...] = DEFAULT_EPILEPSY_TERMS
    seizure_terms: dict[SeizureTypeLabel, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_SEIZURE_TERMS)
    )
    seizure_precedence: tuple[SeizureTypeLabel, ...] = DEFAULT_SEIZURE_PRECEDENCE
    abnormal_terms: tuple[str, ...] = DEFAULT_ABNORMAL_TERMS
    normal_terms: tuple[str, ...] = DEFAULT_NORMAL_TERMS


DEFAULT_RULES = RuleSet()


@dataclass(frozen=True, slots=True)
class RuleTrace:
    """What a classifier decided and the spans that justify it."""

    rule_name: str
    fired: bool
    evidence: tuple[tuple[Span, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.fired and self.evidence:
            raise ValueError("a rule that did not fire cannot carry evidence")


def _entity_matches_terms(entity: Entity, term_token_seqs: list[tuple[str, ...]]) -> bool:
    # Token-level containment: entity "chronic epilepsy" matches term "epilepsy".
    toks = phrase_tokens(entity.surface)
    for seq in term_token_seqs:
        n = len(seq)
        if any(toks[i : i + n] == seq for i in range(len(toks) - n + 1)):
            return True
    return False


def classify_epilepsy(
    seg: SegmentedReport,
    entities: list[Entity] | tuple[Entity, ...],
    rules: RuleSet = DEFAULT_RULES,
) -> tuple[EpilepsyLabel, RuleTrace]:
    """Positive iff a non-negated problem entity in CLINICAL HISTORY matches
    the epilepsy term list."""
    term_seqs = [phrase_tokens(t) for t in rules.epilepsy_terms]
    matched = [
        e
        for e in entities
        if e.kind is EntityKind.PROBLEM
        and e.section == CLINICAL_HISTORY
        and not e.negated
        and _entity_matches_terms(e, term_seqs)
    ]
    if matched:
        trace = RuleTrace(
            rule_name="epilepsy:history-problem-match",
            fired=True,
            evidence=tuple((e.span, e.surface) for e in matched),
        )
        return EpilepsyLabel.EPILEPSY, trace
    return EpilepsyLabel.NO_EPILEPSY, RuleTrace("fallback:no-epilepsy-history", False)


def _normality_matches(
    seg: SegmentedReport,
    sentences: tuple[Sentence, ...],
    rules: RuleSet,
    negation: NegationConfig,
) -> tuple[list[tuple[Span, str, bool]], list[tuple[Span, str, bool]]]:
    """(abnormal-term, normal-term) occurrences as (span, text, negated)."""
    abnormal = _term_lexicon("abnormal_terms", rules.abnormal_terms)
    normal = _term_lexicon("normal_terms", rules.normal_terms)
    abnormal_hits, normal_hits = [], []
    for match in find_phrase_matches(seg, [abnormal, normal], sentences):
        hit = (
            match.span,
            match.span.text_of(seg.report.text),
            detect_negation(seg, match.span, negation),
        )
        (abnormal_hits if match.lexicon_name == "abnormal_terms" else normal_hits).append(hit)
    return abnormal_hits, normal_hits


def classify_normality(
    seg: SegmentedReport,
    entities: list[Entity] | tuple[Entity, ...],
    rules: RuleSet = DEFAULT_RULES,
    negation: NegationConfig = DEFAULT_NEGATION,
) -> tuple[NormalityLabel, RuleTrace]:
    """Decision ladder over IMPRESSION, then the whole document:

    1. a non-negated abnormal term        -> abnormal
    2. a negated abnormal term, or a
       non-negated normal term            -> normal
    3. no term in scope                   -> widen to the whole document
    4. nothing anywhere                   -> abnormal (conservative default)
    """
    scopes = (
        ("impression", seg.sentences_in(IMPRESSION)),
        ("document", seg.sentences),
    )
    for scope_name, sentences in scopes:
        if not sentences:
            continue
        abnormal_hits, normal_hits = _normality_matches(seg, sentences, rules, negation)
        positive = [(s, t) for s, t, negated in abnormal_hits if not negated]
        if positive:
            trace = RuleTrace(f"normality:{scope_name}-abnormal", True, tuple(positive))
            return NormalityLabel.ABNORMAL, trace
        negated_abnormal = [(s, t) for s, t, negated in abnormal_hits if negated]
        plain_normal = [(s, t) for s, t, negated in normal_hits if not negated]
        if negated_abnormal or plain_normal:
            trace = RuleTrace(
                f"normality:{scope_name}-normal",
                True,
                tuple(negated_abnormal + plain_normal),
            )
            return NormalityLabel.NORMAL, trace
        if abnormal_hits or normal_hits:
            # Terms were present in this scope but none was decisive
            # (only negated normal terms); do not widen further.
            break
    return NormalityLabel.ABNORMAL, RuleTrace("fallback:assume-abnormal", False)


def classify_seizure(
    seg: SegmentedReport,
    entities: list[Entity] | tuple[Entity, ...],
    rules: RuleSet = DEFAULT_RULES,
    negation: NegationConfig = DEFAULT_NEGATION,
) -> tuple[SeizureTypeLabel, RuleTrace]:
    """Highest-count seizure type among non-negated phrase mentions."""
    scan = tuple(
        s
        for s in seg.sentences
        if seg.section_of(s) in SEIZURE_SCAN_SECTIONS
    )
    for scope_name, sentences in (("sections", scan), ("document", seg.sentences)):
        if not sentences:
            continue
        counts: dict[SeizureTypeLabel, list[tuple[Span, str]]] = {}
        for label, terms in rules.seizure_terms.items():
            lexicon = _term_lexicon(label.value, terms)
            hits = [
                (m.span, m.span.text_of(seg.report.text))
                for m in find_phrase_matches(seg, [lexicon], sentences)
                if not detect_negation(seg, m.span, negation)
            ]
            if hits:
                counts[label] = hits
        if counts:
            top = max(len(h) for h in counts.values())
            tied = [label for label, hits in counts.items() if len(hits) == top]
            ordered = [l for l in rules.seizure_precedence if l in tied]
            best = ordered[0] if ordered else sorted(tied, key=lambda l: l.value)[0]
            trace = RuleTrace(
                f"seizure:{scope_name}-count", True, tuple(counts[best])
            )
            return best, trace
    return SeizureTypeLabel.NONE, RuleTrace("fallback:no-seizure-terms", False)


def extract_all(
    seg: SegmentedReport,
    entities: list[Entity] | tuple[Entity, ...],
    rules: RuleSet = DEFAULT_RULES,
    negation: NegationConfig = DEFAULT_NEGATION,
) -> ScoreExtraction:
    """Compose the three classifiers into one extraction with merged evidence."""
    seizure, seizure_trace = classify_seizure(seg, entities, rules, negation)
    normality, normality_trace = classify_normality(seg, entities, rules, negation)
    epilepsy, epilepsy_trace = classify_epilepsy(seg, entities, rules)
    evidence: list[Evidence] = []
    for task, trace in (
        (TASK_SEIZURE, seizure_trace),
        (TASK_NORMALITY, normality_trace),
        (TASK_EPILEPSY, epilepsy_trace),
    ):
        if trace.evidence:
            for span, text in trace.evidence:
                evidence.append(Evidence(task, trace.rule_name, span, text))
        else:
            evidence.append(Evidence(task, trace.rule_name))
    return ScoreExtraction(
        record_id=seg.report.record_id,
        seizure_type=seizure,
        normality=normality,
        epilepsy=epilepsy,
        evidence=tuple(evidence),
    )
