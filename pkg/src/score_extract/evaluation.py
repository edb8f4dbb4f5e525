"""Evaluation harness: manifests, confusion matrices, P/R/F1 reporting.

Reports are rendered three ways: JSON, an aligned plain-text table
(Task/Precision/Recall/F1-score/Support), and an optional confusion-matrix
heatmap written to an image file.
"""
from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingPredictionError, ParseError, UnknownLabelError
from .model import (
    EpilepsyLabel,
    NormalityLabel,
    ScoreExtraction,
    SeizureTypeLabel,
)


class Task(enum.Enum):
    SEIZURE = "seizure"
    NORMALITY = "abnormal"
    EPILEPSY = "epilepsy"


TASK_LABELS = {
    Task.SEIZURE: tuple(SeizureTypeLabel),
    Task.NORMALITY: tuple(NormalityLabel),
    Task.EPILEPSY: tuple(EpilepsyLabel),
}

# Gold-label spellings accepted in manifests, normalized to upper case.
_SEIZURE_ALIASES = {
    "ABSZ": SeizureTypeLabel.ABSENCE,
    "CPSZ": SeizureTypeLabel.COMPLEX_PARTIAL,
    "SPSZ": SeizureTypeLabel.SIMPLE_PARTIAL,
    "MYSZ": SeizureTypeLabel.MYOCLONIC,
    "TCSZ": SeizureTypeLabel.TONIC_CLONIC,
    "GTCSZ": SeizureTypeLabel.TONIC_CLONIC,
    "NONE": SeizureTypeLabel.NONE,
}

# Under-specified seizure rows are dropped from the task, but counted.
EXCLUDED_SEIZURE_LABELS = frozenset({"GNSZ", "FNSZ"})

_MANIFEST_HEADER = ["record_id", "path", "label"]

_EXCLUDED = object()


def _parse_gold(task: Task, raw: str):
    normalized = raw.strip().upper().replace(" ", "_").replace("-", "_")
    if task is Task.SEIZURE:
        if normalized in EXCLUDED_SEIZURE_LABELS:
            return _EXCLUDED
        if normalized in _SEIZURE_ALIASES:
            return _SEIZURE_ALIASES[normalized]
    for label in TASK_LABELS[task]:
        if normalized == label.value.upper():
            return label
    return None


@dataclass(frozen=True, slots=True)
class ManifestEntry:
    record_id: str
    path: str
    gold: object  # a member of the task's label enum


@dataclass(frozen=True)
class Manifest:
    task: Task
    entries: tuple[ManifestEntry, ...]
    excluded_count: int = 0


def load_manifest(path: str | Path, task: Task) -> Manifest:
    """Load a "record_id,path,label" CSV, applying the task's exclusions."""
    path = Path(path)
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    excluded = 0
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}:1: empty manifest (missing header)") from None
        if [h.strip() for h in header] != _MANIFEST_HEADER:
            raise ParseError(
                f"{path}:1: expected header {','.join(_MANIFEST_HEADER)!r}, got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            record_id, report_path, raw_label = (field.strip() for field in row)
            if not record_id:
                raise ParseError(f"{path}:{lineno}: empty record_id")
            if record_id in seen:
                raise ParseError(f"{path}:{lineno}: duplicate record_id {record_id!r}")
            seen.add(record_id)
            gold = _parse_gold(task, raw_label)
            if gold is _EXCLUDED:
                excluded += 1
                continue
            if gold is None:
                raise UnknownLabelError(
                    f"{path}:{lineno}: unknown {task.value} label {raw_label!r}"
                )
            entries.append(ManifestEntry(record_id, report_path, gold))
    return Manifest(task=task, entries=tuple(entries), excluded_count=excluded)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold-by-predicted counts over a fixed label order."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def cell(self, gold: str, predicted: str) -> int:
        return self.counts[self.labels.index(gold)][self.labels.index(predicted)]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


def confusion(preds: dict, manifest: Manifest) -> ConfusionMatrix:
    """Count gold-vs-predicted labels; preds must cover every manifest id."""
    labels = tuple(label.value for label in TASK_LABELS[manifest.task])
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for entry in manifest.entries:
        if entry.record_id not in preds:
            raise MissingPredictionError(
                f"no prediction for manifest record {entry.record_id!r}"
            )
        predicted = preds[entry.record_id]
        counts[index[entry.gold.value]][index[predicted.value]] += 1
    return ConfusionMatrix(labels, tuple(tuple(row) for row in counts))


@dataclass(frozen=True, slots=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    task: Task
    confusion: ConfusionMatrix
    per_class: dict[str, ClassMetrics]
    weighted: ClassMetrics  # support field holds the total support
    excluded_count: int = 0


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics(matrix: ConfusionMatrix) -> tuple[dict[str, ClassMetrics], ClassMetrics]:
    """One-vs-rest per-class precision/recall/F1 plus support-weighted averages.

    Empty classes follow the 0/0 -> 0 convention.
    """
    per_class: dict[str, ClassMetrics] = {}
    n = len(matrix.labels)
    for i, label in enumerate(matrix.labels):
        tp = matrix.counts[i][i]
        support = sum(matrix.counts[i])
        predicted = sum(matrix.counts[g][i] for g in range(n))
        precision = _safe_div(tp, predicted)
        recall = _safe_div(tp, support)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[label] = ClassMetrics(precision, recall, f1, support)
    total = sum(m.support for m in per_class.values())
    weighted = ClassMetrics(
        precision=sum(_safe_div(m.support, total) * m.precision for m in per_class.values()),
        recall=sum(_safe_div(m.support, total) * m.recall for m in per_class.values()),
        f1=sum(_safe_div(m.support, total) * m.f1 for m in per_class.values()),
        support=total,
    )
    return per_class, weighted


def prediction_for(task: Task, extraction: ScoreExtraction):
    if task is Task.SEIZURE:
        return extraction.seizure_type
    if task is Task.NORMALITY:
        return extraction.normality
    return extraction.epilepsy


def evaluate(corpus_dir: str | Path, manifest: Manifest, config) -> EvalReport:
    """Run the full pipeline over every manifest entry and score it.

    ``config`` is a PipelineConfig (see config.py). Deterministic for a
    fixed corpus and config.
    """
    from .classifiers import extract_all
    from .corpus import read_report
    from .ner import tag_report
    from .segmenter import segment

    corpus_dir = Path(corpus_dir)
    preds = {}
    for entry in manifest.entries:
        path = Path(entry.path)
        if not path.is_absolute():
            path = corpus_dir / path
        report = read_report(path, record_id=entry.record_id)
        seg = segment(report, config.segmenter)
        entities = tag_report(seg, config.tagger, config.lexicons, config.negation)
        extraction = extract_all(seg, entities, config.rules, config.negation)
        preds[entry.record_id] = prediction_for(manifest.task, extraction)
    matrix = confusion(preds, manifest)
    per_class, weighted = metrics(matrix)
    return EvalReport(
        task=manifest.task,
        confusion=matrix,
        per_class=per_class,
        weighted=weighted,
        excluded_count=manifest.excluded_count,
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def report_to_dict(report: EvalReport) -> dict:
    return {
        "task": report.task.value,
        "labels": list(report.confusion.labels),
        "confusion": [list(row) for row in report.confusion.counts],
        "per_class": {
            label: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for label, m in report.per_class.items()
        },
        "weighted": {
            "precision": report.weighted.precision,
            "recall": report.weighted.recall,
            "f1": report.weighted.f1,
            "support": report.weighted.support,
        },
        "excluded_count": report.excluded_count,
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2)


def _table_row(name: str, precision: float, recall: float, f1: float, support: int) -> str:
    return f"{name:<20}{precision:>10.4f}{recall:>10.4f}{f1:>10.4f}{support:>10d}"


def render_table(report: EvalReport) -> str:
    """Aligned plain-text table: weighted summary row plus per-class rows."""
    header = f"{'Task':<20}{'Precision':>10}{'Recall':>10}{'F1-score':>10}{'Support':>10}"
    lines = [
        header,
        _table_row(
            report.task.value,
            report.weighted.precision,
            report.weighted.recall,
            report.weighted.f1,
            report.weighted.support,
        ),
        "",
        f"{'Per class':<20}{'Precision':>10}{'Recall':>10}{'F1-score':>10}{'Support':>10}",
    ]
    for label in report.confusion.labels:
        m = report.per_class[label]
        lines.append(_table_row(label, m.precision, m.recall, m.f1, m.support))
    lines.append("")
    lines.append(f"Excluded records: {report.excluded_count}")
    return "\n".join(lines) + "\n"


def render_confusion_figure(report: EvalReport, path: str | Path) -> None:
    """Write a confusion-matrix heatmap (gold rows, predicted columns)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = report.confusion.labels
    counts = [list(row) for row in report.confusion.counts]
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(labels), 1.0 + 0.9 * len(labels)))
    image = ax.imshow(counts, cmap="Blues")
    ax.set_xticks(range(len(labels)), labels, rotation=45, ha="right")
    ax.set_yticks(range(len(labels)), labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    ax.set_title(f"{report.task.value} confusion")
    peak = max((c for row in counts for c in row), default=0)
    for g in range(len(labels)):
        for p in range(len(labels)):
            color = "white" if peak and counts[g][p] > peak / 2 else "black"
            ax.text(p, g, str(counts[g][p]), ha="center", va="center", color=color)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
