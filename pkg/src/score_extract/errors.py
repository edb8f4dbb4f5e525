"""Exception hierarchy shared across the toolkit.

Usage errors (bad CLI arguments) are handled in the CLI layer; everything
here is a data or environment problem and maps to exit code 2.
"""


class ScoreExtractError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ScoreExtractError):
    """Configuration file is missing, malformed, or references absent files."""


class LexiconError(ScoreExtractError):
    """Lexicon file violates the lexicon format or its invariants."""


class TransportError(ScoreExtractError):
    """Remote tagger endpoint unreachable after exhausting all attempts."""


class ProtocolError(ScoreExtractError):
    """Remote tagger returned a malformed or non-200 response."""


class ParseError(ScoreExtractError):
    """Malformed manifest row; message carries the offending line number."""


class UnknownLabelError(ScoreExtractError):
    """Manifest gold label is neither a task label nor a known exclusion."""


class MissingPredictionError(ScoreExtractError):
    """A manifest record id has no prediction."""


class CorpusError(ScoreExtractError):
    """No report in the corpus directory could be read."""
