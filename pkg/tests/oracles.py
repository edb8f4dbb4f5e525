"""Independent brute-force oracles used by the test suite.

Deliberately computed from per-record (gold, predicted) pairs rather than
from the matrix algebra in score_extract.evaluation.
"""
from __future__ import annotations

import random

from score_extract.evaluation import ConfusionMatrix


def expand_to_records(matrix: ConfusionMatrix) -> list[tuple[str, str]]:
    pairs = []
    for g, gold in enumerate(matrix.labels):
        for p, pred in enumerate(matrix.labels):
            pairs.extend([(gold, pred)] * matrix.counts[g][p])
    return pairs


def brute_force_metrics(matrix: ConfusionMatrix):
    """Per-class and weighted P/R/F1 by counting records one at a time."""
    records = expand_to_records(matrix)
    per_class = {}
    for label in matrix.labels:
        tp = sum(1 for g, p in records if g == label and p == label)
        fp = sum(1 for g, p in records if g != label and p == label)
        fn = sum(1 for g, p in records if g == label and p != label)
        support = sum(1 for g, _ in records if g == label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = (precision, recall, f1, support)
    total = len(records)
    weighted = tuple(
        sum(per_class[label][i] * per_class[label][3] for label in matrix.labels) / total
        if total
        else 0.0
        for i in range(3)
    ) + (total,)
    return per_class, weighted


def random_confusion_matrix(rng: random.Random, max_labels: int = 6, max_count: int = 20) -> ConfusionMatrix:
    n = rng.randint(1, max_labels)
    labels = tuple(f"L{i}" for i in range(n))
    counts = tuple(
        tuple(rng.randint(0, max_count) for _ in range(n)) for _ in range(n)
    )
    return ConfusionMatrix(labels, counts)
