"""score-extract: structured seizure/normality/epilepsy metadata from EEG reports.

The pipeline runs in two stages: broad parsing (section segmentation plus
entity tagging) and narrow parsing (rule classifiers over the sections and
entities), with an evaluation harness for scoring against gold manifests.
"""
from .classifiers import (
    RuleSet,
    RuleTrace,
    classify_epilepsy,
    classify_normality,
    classify_seizure,
    extract_all,
)
from .config import PipelineConfig, load_config
from .evaluation import EvalReport, Manifest, Task, confusion, evaluate, load_manifest, metrics
from .model import (
    CanonicalSection,
    Entity,
    EntityKind,
    EpilepsyLabel,
    NormalityLabel,
    Report,
    ScoreExtraction,
    SegmentedReport,
    SeizureTypeLabel,
    Span,
    validate_extraction,
)
from .ner import (
    Lexicon,
    NegationConfig,
    TaggerConfig,
    TaggerMode,
    detect_negation,
    gazetteer_tag,
    remote_tag,
    tag_report,
)
from .segmenter import SegmenterConfig, find_headers, segment, split_sentences

__version__ = "0.1.0"

__all__ = [
    "CanonicalSection",
    "Entity",
    "EntityKind",
    "EpilepsyLabel",
    "EvalReport",
    "Lexicon",
    "Manifest",
    "NegationConfig",
    "NormalityLabel",
    "PipelineConfig",
    "Report",
    "RuleSet",
    "RuleTrace",
    "ScoreExtraction",
    "SegmentedReport",
    "SegmenterConfig",
    "SeizureTypeLabel",
    "Span",
    "TaggerConfig",
    "TaggerMode",
    "Task",
    "classify_epilepsy",
    "classify_normality",
    "classify_seizure",
    "confusion",
    "detect_negation",
    "evaluate",
    "extract_all",
    "find_headers",
    "gazetteer_tag",
    "load_config",
    "load_manifest",
    "metrics",
    "remote_tag",
    "segment",
    "split_sentences",
    "tag_report",
    "validate_extraction",
    "__version__",
]
