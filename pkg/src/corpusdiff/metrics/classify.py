"""Discrepancy classifier scoring: per-class F1 and confusion matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import LengthMismatch
from ..llm.tasks import LABELS


@dataclass
class ClassReport:
    labels: tuple[str, ...]
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    support: dict[str, int]
    confusion: list[list[int]]  # rows: gold, columns: predicted

    def confusion_rows(self) -> list[dict]:
        rows = []
        for i, gold in enumerate(self.labels):
            row = {"gold": gold}
            for j, pred in enumerate(self.labels):
                row[pred] = self.confusion[i][j]
            rows.append(row)
        return rows


def score_classifier(
    predictions: Sequence[str], golds: Sequence[str], labels: Sequence[str] = LABELS
) -> ClassReport:
    if len(predictions) != len(golds):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(golds)} gold labels"
        )
    if not predictions:
        raise LengthMismatch("empty inputs")
    labels = tuple(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    for value in list(predictions) + list(golds):
        if value not in pos:
            raise ValueError(f"label {value!r} outside {labels}")
    confusion = [[0] * len(labels) for _ in labels]
    for pred, gold in zip(predictions, golds):
        confusion[pos[gold]][pos[pred]] += 1
    precision, recall, f1, support = {}, {}, {}, {}
    for lab in labels:
        i = pos[lab]
        tp = confusion[i][i]
        fp = sum(confusion[g][i] for g in range(len(labels))) - tp
        fn = sum(confusion[i]) - tp
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        precision[lab] = p
        recall[lab] = r
        f1[lab] = 2 * p * r / (p + r) if p + r else 0.0
        support[lab] = tp + fn
    return ClassReport(
        labels=labels,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        confusion=confusion,
    )
