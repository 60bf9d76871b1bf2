"""Stratified train/dev/test splits and cross-validation folds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import ConfigError, InsufficientClassSamples
from .table import Dataset


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.8
    dev: float = 0.1
    test: float = 0.1
    k: int = 10
    seed: int = 0

    def __post_init__(self):
        parts = (self.train, self.dev, self.test)
        if min(parts) < 0 or abs(sum(parts) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must be non-negative and sum to 1, got {parts}")
        if self.k < 2:
            raise ConfigError("k must be at least 2")


def largest_remainder(total: int, weights) -> list[int]:
    """Apportion ``total`` by ``weights``; remainder ties go to the later part."""
    ws = [Fraction(str(w)) if isinstance(w, float) else Fraction(w) for w in weights]
    norm = sum(ws)
    quotas = [total * w / norm for w in ws]
    sizes = [q.numerator // q.denominator for q in quotas]
    rest = total - sum(sizes)
    order = sorted(range(len(ws)), key=lambda i: (quotas[i] - sizes[i], i), reverse=True)
    for i in order[:rest]:
        sizes[i] += 1
    return sizes


def split_indices(y: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = len(y)
    sizes = largest_remainder(n, (spec.train, spec.dev, spec.test))
    neg = int((y == 0).sum())
    neg_sizes = largest_remainder(neg, sizes) if n else [0, 0, 0]
    pos_sizes = [s - a for s, a in zip(sizes, neg_sizes)]
    rng = np.random.default_rng(spec.seed)
    parts: list[list[int]] = [[], [], []]
    for cls, alloc in ((0, neg_sizes), (1, pos_sizes)):
        idx = rng.permutation(np.flatnonzero(y == cls))
        at = 0
        for p, count in enumerate(alloc):
            parts[p].extend(idx[at:at + count].tolist())
            at += count
    return tuple(np.array(sorted(p), dtype=int) for p in parts)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    train, dev, test = split_indices(ds.y, spec)
    return ds.subset(train), ds.subset(dev), ds.subset(test)


def fold_indices(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Stratified folds: each class is shuffled, then dealt round-robin."""
    if k < 2:
        raise ConfigError("k must be at least 2")
    rng = np.random.default_rng(seed)
    order = []
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        if 0 < len(idx) < k:
            raise InsufficientClassSamples(f"class {cls} has {len(idx)} samples, fewer than k={k}")
        order.extend(rng.permutation(idx).tolist())
    folds = [sorted(order[i::k]) for i in range(k)]
    return [np.array(f, dtype=int) for f in folds]


def folds(ds: Dataset, k: int, seed: int) -> list[Dataset]:
    return [ds.subset(f) for f in fold_indices(ds.y, k, seed)]
