"""Confusion matrices and information-retrieval measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import LengthMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    TP: int
    TN: int
    FP: int
    FN: int

    def __post_init__(self):
        if min(self.TP, self.TN, self.FP, self.FN) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.TP + self.TN + self.FP + self.FN


@dataclass(frozen=True)
class IRMetrics:
    accuracy: float
    precision: float | None  # undefined when nothing is predicted positive
    recall: float  # 0 when there are no positives
    f_measure: float | None  # undefined together with precision

    def percent(self, name: str) -> str:
        value = getattr(self, name)
        return "n/a" if value is None else f"{100.0 * value:.1f}"


def confusion(truth: Sequence[int], predictions: Sequence[int]) -> ConfusionMatrix:
    t = np.asarray(truth, dtype=int).ravel()
    p = np.asarray(predictions, dtype=int).ravel()
    if len(t) != len(p):
        raise LengthMismatch(f"{len(t)} labels but {len(p)} predictions")
    return ConfusionMatrix(
        TP=int(np.sum((t == 1) & (p == 1))),
        TN=int(np.sum((t == 0) & (p == 0))),
        FP=int(np.sum((t == 0) & (p == 1))),
        FN=int(np.sum((t == 1) & (p == 0))),
    )


def ir_measures(cm: ConfusionMatrix) -> IRMetrics:
    total = cm.total
    accuracy = (cm.TP + cm.TN) / total if total else 0.0
    precision = cm.TP / (cm.TP + cm.FP) if cm.TP + cm.FP else None
    recall = cm.TP / (cm.TP + cm.FN) if cm.TP + cm.FN else 0.0
    if precision is None:
        f = None
    elif precision + recall == 0:
        f = 0.0
    else:
        f = 2.0 * precision * recall / (precision + recall)
    return IRMetrics(accuracy, precision, recall, f)
