"""Entity extraction: gazetteer tagger, negation scoping, remote tagger client.

The gazetteer path is fully deterministic and has no runtime dependencies;
the remote path speaks the wire protocol documented in protocol/PROTOCOL.md
and produces entities with the identical downstream schema.
"""
from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

from .errors import ConfigError, LexiconError, ProtocolError, TransportError
from .model import (
    PREAMBLE,
    CanonicalSection,
    Entity,
    EntityKind,
    EntitySource,
    Report,
    SegmentedReport,
    Sentence,
    Span,
)

logger = logging.getLogger(__name__)

# A token is a maximal run of letters/digits (underscore excluded).
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)

WIRE_LABELS = frozenset(k.value for k in EntityKind)


@dataclass(frozen=True, slots=True)
class Token:
    span: Span
    text: str  # lowercased


def tokenize(text: str, base: int = 0) -> list[Token]:
    """Tokenize text into lowercased letter/digit runs with absolute spans."""
    return [
        Token(Span(base + m.start(), base + m.end()), m.group(0).lower())
        for m in _TOKEN.finditer(text)
    ]


def phrase_tokens(phrase: str) -> tuple[str, ...]:
    return tuple(t.text for t in tokenize(phrase))


@dataclass(frozen=True)
class Lexicon:
    """A named term list emitting one entity kind.

    Terms are stored lowercased and whitespace-normalized; matching is
    token-based, so "tonic-clonic" and "tonic clonic" are equivalent.
    """

    name: str
    kind: EntityKind
    terms: frozenset[str]

    def __post_init__(self) -> None:
        if not self.terms:
            raise LexiconError(f"lexicon {self.name!r} has no terms")
        for term in self.terms:
            n = len(phrase_tokens(term))
            if not 1 <= n <= 6:
                raise LexiconError(
                    f"lexicon {self.name!r}: phrase {term!r} has {n} tokens (1..6 allowed)"
                )

    @staticmethod
    def from_terms(name: str, kind: EntityKind, terms: list[str] | tuple[str, ...]) -> Lexicon:
        normalized = frozenset(" ".join(t.split()).lower() for t in terms if t.strip())
        return Lexicon(name=name, kind=kind, terms=normalized)


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a lexicon file: "kind: <label>" header, one phrase per line, # comments."""
    path = Path(path)
    kind: EntityKind | None = None
    terms: list[str] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("kind:"):
            label = line.split(":", 1)[1].strip().lower()
            try:
                kind = EntityKind(label)
            except ValueError:
                raise LexiconError(f"{path}:{lineno}: unknown entity kind {label!r}") from None
            continue
        terms.append(line)
    if kind is None:
        raise LexiconError(f"{path}: missing 'kind:' header line")
    return Lexicon.from_terms(path.stem, kind, terms)


def default_lexicons() -> tuple[Lexicon, ...]:
    """The lexicons shipped with the package, sorted by name."""
    lexicons = []
    root = resources.files("score_extract").joinpath("lexicons")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".lex"):
            with resources.as_file(entry) as path:
                lexicons.append(load_lexicon(path))
    return tuple(lexicons)


# ---------------------------------------------------------------------------
# Negation scoping
# ---------------------------------------------------------------------------

DEFAULT_NEGATION_TRIGGERS = (
    "no",
    "not",
    "without",
    "denies",
    "denied",
    "negative for",
    "no evidence of",
    "no history of",
    "free of",
)

# Scope blockers between trigger and entity. Plain words are compared
# token-wise; anything else (";") is searched for in the raw text.
DEFAULT_NEGATION_BLOCKERS = ("but", "however", "although", ";")

DEFAULT_NEGATION_WINDOW = 6


@dataclass(frozen=True)
class NegationConfig:
    triggers: tuple[str, ...] = DEFAULT_NEGATION_TRIGGERS
    blockers: tuple[str, ...] = DEFAULT_NEGATION_BLOCKERS
    window: int = DEFAULT_NEGATION_WINDOW


DEFAULT_NEGATION = NegationConfig()


def _token_index_at(tokens: list[Token], offset: int) -> int | None:
    """Index of the first token overlapping or starting at offset."""
    for i, token in enumerate(tokens):
        if token.span.end > offset:
            return i
    return None


def detect_negation(
    seg: SegmentedReport,
    entity_span: Span,
    config: NegationConfig = DEFAULT_NEGATION,
) -> bool:
    """True when a trigger scopes over the entity within its sentence.

    A trigger fires when its last token lies within ``window`` tokens before
    the entity's first token and no blocker occurs between them. The check
    never looks outside the containing sentence.
    """
    sentence = seg.sentence_containing(entity_span)
    if sentence is None:
        raise ValueError(f"entity span {entity_span} is not inside any sentence")
    text = seg.report.text
    tokens = tokenize(sentence.span.text_of(text), base=sentence.span.start)
    entity_idx = _token_index_at(tokens, entity_span.start)
    if entity_idx is None:
        return False

    word_blockers = {b.lower() for b in config.blockers if b.isalnum()}
    char_blockers = [b for b in config.blockers if not b.isalnum()]
    trigger_seqs = [phrase_tokens(t) for t in config.triggers]

    for j in range(entity_idx):
        for trig in trigger_seqs:
            last = j + len(trig) - 1
            if last >= entity_idx:
                continue
            if tuple(t.text for t in tokens[j : last + 1]) != trig:
                continue
            if not 1 <= entity_idx - last <= config.window:
                continue
            between_tokens = tokens[last + 1 : entity_idx]
            if any(t.text in word_blockers for t in between_tokens):
                continue
            between_text = text[tokens[last].span.end : entity_span.start]
            if any(b in between_text for b in char_blockers):
                continue
            return True
    return False


# ---------------------------------------------------------------------------
# Phrase matching (shared by the gazetteer and the rule classifiers)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PhraseMatch:
    span: Span
    phrase: str
    lexicon_name: str
    kind: EntityKind
    sentence: Sentence


def _phrase_index(lexicons: tuple[Lexicon, ...] | list[Lexicon]):
    index: dict[str, list[tuple[tuple[str, ...], str, Lexicon]]] = {}
    for lexicon in lexicons:
        for term in lexicon.terms:
            toks = phrase_tokens(term)
            index.setdefault(toks[0], []).append((toks, term, lexicon))
    return index


def find_phrase_matches(
    seg: SegmentedReport,
    lexicons: tuple[Lexicon, ...] | list[Lexicon],
    sentences: tuple[Sentence, ...] | None = None,
) -> list[PhraseMatch]:
    """All case-insensitive, token-aligned phrase occurrences, with overlaps
    resolved longest-match-first, then leftmost.

    The tie-break beyond span geometry (kind value, lexicon name, phrase) is
    fixed, so results never depend on lexicon listing order.
    """
    index = _phrase_index(lexicons)
    text = seg.report.text
    candidates: list[PhraseMatch] = []
    for sentence in sentences if sentences is not None else seg.sentences:
        tokens = tokenize(sentence.span.text_of(text), base=sentence.span.start)
        for i, token in enumerate(tokens):
            for toks, term, lexicon in index.get(token.text, ()):
                j = i + len(toks)
                if j > len(tokens):
                    continue
                if tuple(t.text for t in tokens[i:j]) != toks:
                    continue
                span = Span(tokens[i].span.start, tokens[j - 1].span.end)
                candidates.append(
                    PhraseMatch(span, term, lexicon.name, lexicon.kind, sentence)
                )

    candidates.sort(
        key=lambda m: (-len(m.span), m.span.start, m.kind.value, m.lexicon_name, m.phrase)
    )
    kept: list[PhraseMatch] = []
    for match in candidates:
        if not any(match.span.overlaps(k.span) for k in kept):
            kept.append(match)
    kept.sort(key=lambda m: (m.span.start, m.span.end))
    return kept


def gazetteer_tag(
    seg: SegmentedReport,
    lexicons: tuple[Lexicon, ...] | list[Lexicon],
    negation: NegationConfig = DEFAULT_NEGATION,
) -> list[Entity]:
    """Tag every maximal lexicon-phrase occurrence as an entity."""
    entities = []
    for match in find_phrase_matches(seg, lexicons):
        entities.append(
            Entity(
                kind=match.kind,
                span=match.span,
                surface=match.span.text_of(seg.report.text),
                section=seg.section_of(match.sentence),
                negated=detect_negation(seg, match.span, negation),
                source=EntitySource.GAZETTEER,
            )
        )
    return entities


# ---------------------------------------------------------------------------
# Remote tagger client
# ---------------------------------------------------------------------------


class TaggerMode(enum.Enum):
    GAZETTEER_ONLY = "gazetteer"
    REMOTE_ONLY = "remote"
    REMOTE_PREFERRED_WITH_FALLBACK = "remote-with-fallback"


@dataclass(frozen=True)
class TaggerConfig:
    """How entities are produced.

    ``max_retries`` is the total request attempt budget for the remote path;
    a TransportError is raised after exactly that many failed attempts.
    """

    mode: TaggerMode = TaggerMode.GAZETTEER_ONLY
    remote_endpoint: str | None = None
    timeout: float = 10.0
    max_retries: int = 3

    def __post_init__(self) -> None:
        if self.mode is not TaggerMode.GAZETTEER_ONLY and not self.remote_endpoint:
            raise ConfigError(f"tagger mode {self.mode.value!r} requires an endpoint")
        if self.max_retries < 1:
            raise ConfigError("max_retries must be at least 1")


DEFAULT_TAGGER = TaggerConfig()


def _request_entities(text: str, config: TaggerConfig) -> list[dict]:
    url = config.remote_endpoint.rstrip("/") + "/v1/entities"
    last_error: Exception | None = None
    for _ in range(config.max_retries):
        try:
            response = requests.post(url, json={"text": text}, timeout=config.timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = exc
            continue
        if response.status_code != 200:
            raise ProtocolError(f"{url} returned status {response.status_code}")
        try:
            payload = response.json()
        except ValueError as exc:
            raise ProtocolError(f"{url} returned a non-JSON body") from exc
        return _validate_wire_entities(payload, len(text), url)
    raise TransportError(
        f"{url} unreachable after {config.max_retries} attempts: {last_error}"
    )


def _validate_wire_entities(payload: object, text_len: int, url: str) -> list[dict]:
    if not isinstance(payload, dict) or not isinstance(payload.get("entities"), list):
        raise ProtocolError(f"{url}: response is missing an 'entities' list")
    for item in payload["entities"]:
        if not isinstance(item, dict):
            raise ProtocolError(f"{url}: entity is not an object: {item!r}")
        start, end, label = item.get("start"), item.get("end"), item.get("label")
        if not (isinstance(start, int) and isinstance(end, int)) or isinstance(start, bool) or isinstance(end, bool):
            raise ProtocolError(f"{url}: entity offsets must be integers: {item!r}")
        if not 0 <= start < end <= text_len:
            raise ProtocolError(f"{url}: entity offsets out of range: {item!r}")
        if label not in WIRE_LABELS:
            raise ProtocolError(f"{url}: unknown entity label {label!r}")
    return payload["entities"]


def _attribute(seg: SegmentedReport, span: Span) -> tuple[CanonicalSection, bool]:
    """Section for a span, plus whether it sits fully inside one sentence."""
    sentence = seg.sentence_containing(span)
    if sentence is not None:
        return seg.section_of(sentence), True
    for s in seg.sentences:
        if s.span.start <= span.start < s.span.end:
            return seg.section_of(s), False
    for segm in seg.sections:
        covers_header = segm.header.start <= span.start < segm.header.end
        covers_body = segm.body is not None and segm.body.start <= span.start < segm.body.end
        if covers_header or covers_body:
            return segm.section, False
    return PREAMBLE, False


def entities_from_wire(
    seg: SegmentedReport,
    wire_entities: list[dict],
    negation: NegationConfig = DEFAULT_NEGATION,
) -> list[Entity]:
    """Build entities from validated wire items, attributing section and
    negation locally exactly as the gazetteer path does."""
    text = seg.report.text
    entities = []
    for item in sorted(wire_entities, key=lambda d: (d["start"], d["end"])):
        span = Span(item["start"], item["end"])
        section, in_sentence = _attribute(seg, span)
        entities.append(
            Entity(
                kind=EntityKind(item["label"]),
                span=span,
                surface=span.text_of(text),
                section=section,
                negated=detect_negation(seg, span, negation) if in_sentence else False,
                source=EntitySource.REMOTE,
            )
        )
    return entities


def remote_tag(
    text: str,
    config: TaggerConfig,
    negation: NegationConfig = DEFAULT_NEGATION,
    segmenter_config=None,
) -> list[Entity]:
    """Tag a report text through the remote wire protocol (one request)."""
    from .segmenter import DEFAULT_SEGMENTER, segment

    if config.mode is TaggerMode.GAZETTEER_ONLY:
        raise ConfigError("remote_tag requires a remote tagger mode")
    wire = _request_entities(text, config)
    seg = segment(
        Report(record_id="remote", text=text),
        segmenter_config if segmenter_config is not None else DEFAULT_SEGMENTER,
    )
    return entities_from_wire(seg, wire, negation)


def check_health(config: TaggerConfig) -> bool:
    """True when the remote endpoint answers its health check."""
    if not config.remote_endpoint:
        return False
    url = config.remote_endpoint.rstrip("/") + "/v1/health"
    try:
        response = requests.get(url, timeout=config.timeout)
    except (requests.ConnectionError, requests.Timeout):
        return False
    return response.status_code == 200


def tag_report(
    seg: SegmentedReport,
    config: TaggerConfig = DEFAULT_TAGGER,
    lexicons: tuple[Lexicon, ...] | None = None,
    negation: NegationConfig = DEFAULT_NEGATION,
) -> list[Entity]:
    """Produce entities for a segmented report per the tagger mode."""
    if lexicons is None:
        lexicons = default_lexicons()
    if config.mode is TaggerMode.GAZETTEER_ONLY:
        return gazetteer_tag(seg, lexicons, negation)
    try:
        wire = _request_entities(seg.report.text, config)
        return entities_from_wire(seg, wire, negation)
    except (TransportError, ProtocolError):
        if config.mode is TaggerMode.REMOTE_ONLY:
            raise
        logger.warning(
            "remote tagger failed for %s; falling back to gazetteer",
            seg.report.record_id,
            exc_info=True,
        )
        return gazetteer_tag(seg, lexicons, negation)
