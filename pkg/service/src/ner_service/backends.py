"""Model backends producing raw (start, end, model_label) spans.

The service maps model labels to wire labels afterwards, so backends are
free to emit whatever label inventory their checkpoint uses.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol

from .config import BUILTIN_MODEL


@dataclass(frozen=True, slots=True)
class RawEntity:
    start: int
    end: int
    label: str


class Backend(Protocol):
    ready: bool

    def load(self) -> None: ...

    def predict(self, text: str) -> list[RawEntity]: ...


# Small clinical term inventory for the deterministic backend. Enough to
# exercise the protocol end to end without any model download.
_TERM_LABELS = {
    "PROBLEM": (
        "epilepsy",
        "seizure disorder",
        "seizures",
        "seizure",
        "stroke",
        "headache",
        "syncope",
        "encephalopathy",
        "slowing",
    ),
    "TEST": ("eeg", "mri", "ct scan"),
    "TREATMENT": ("hyperventilation", "photic stimulation"),
    "DRUG": ("keppra", "dilantin", "depakote", "phenytoin", "levetiracetam"),
}


class TermMatcherBackend:
    """Deterministic word-boundary term matcher, longest match first."""

    def __init__(self) -> None:
        self.ready = False
        self._patterns: list[tuple[re.Pattern[str], str]] = []

    def load(self) -> None:
        patterns = []
        for label, terms in _TERM_LABELS.items():
            for term in sorted(terms, key=len, reverse=True):
                escaped = re.escape(term).replace(r"\ ", r"\s+")
                patterns.append((re.compile(rf"\b{escaped}\b", re.IGNORECASE), label))
        self._patterns = patterns
        self.ready = True

    def predict(self, text: str) -> list[RawEntity]:
        found: list[RawEntity] = []
        taken: list[tuple[int, int]] = []
        for pattern, label in self._patterns:
            for m in pattern.finditer(text):
                if any(m.start() < e and s < m.end() for s, e in taken):
                    continue
                taken.append((m.start(), m.end()))
                found.append(RawEntity(m.start(), m.end(), label))
        found.sort(key=lambda e: (e.start, e.end))
        return found


class TransformerBackend:
    """Token-classification pipeline over a pretrained checkpoint.

    Imported lazily so the service (and its tests) run without torch or
    transformers installed when only the builtin backend is used.
    """

    def __init__(self, model: str) -> None:
        self.model = model
        self.ready = False
        self._pipeline = None

    def load(self) -> None:
        from transformers import pipeline

        self._pipeline = pipeline(
            "token-classification", model=self.model, aggregation_strategy="simple"
        )
        self.ready = True

    def predict(self, text: str) -> list[RawEntity]:
        if not text.strip():
            return []
        return [
            RawEntity(int(item["start"]), int(item["end"]), str(item["entity_group"]))
            for item in self._pipeline(text)
        ]


def make_backend(model: str) -> Backend:
    if model == BUILTIN_MODEL:
        return TermMatcherBackend()
    return TransformerBackend(model)
