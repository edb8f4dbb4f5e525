"""Service configuration."""
from __future__ import annotations

from dataclasses import dataclass, field

WIRE_LABELS = frozenset(
    {"problem", "test", "treatment", "drug", "dose", "frequency", "duration", "reason"}
)

# Public checkpoint emitting problem/test/treatment groups. Models trained on
# access-restricted shared-task data (n2c2/i2b2) cannot be redistributed;
# point ``model`` at any local fine-tuned checkpoint instead.
DEFAULT_CHECKPOINT = "samrawal/bert-base-uncased_clinical-ner"

# The deterministic term-matcher backend; no model download required.
BUILTIN_MODEL = "builtin:terms"

DEFAULT_LABEL_MAP = {
    "problem": "problem",
    "PROBLEM": "problem",
    "test": "test",
    "TEST": "test",
    "treatment": "treatment",
    "TREATMENT": "treatment",
    "drug": "drug",
    "DRUG": "drug",
    "dose": "dose",
    "DOSE": "dose",
    "frequency": "frequency",
    "FREQUENCY": "frequency",
    "duration": "duration",
    "DURATION": "duration",
    "reason": "reason",
    "REASON": "reason",
}


@dataclass(frozen=True)
class ServiceConfig:
    """Runtime knobs for the tagging service.

    ``max_input_chars`` is both the 413 threshold when chunking is off and
    the chunk window size when it is on.
    """

    model: str = DEFAULT_CHECKPOINT
    host: str = "127.0.0.1"
    port: int = 8400
    max_input_chars: int = 4000
    chunk_overlap: int = 200
    chunking_enabled: bool = True
    label_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_LABEL_MAP))

    def __post_init__(self) -> None:
        if self.max_input_chars < 1:
            raise ValueError("max_input_chars must be positive")
        if self.chunking_enabled and not 0 <= self.chunk_overlap < self.max_input_chars:
            raise ValueError("chunk_overlap must be smaller than max_input_chars")
        bad_targets = set(self.label_map.values()) - WIRE_LABELS
        if bad_targets:
            raise ValueError(f"label_map targets outside the wire label set: {bad_targets}")
