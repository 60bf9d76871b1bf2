"""Over- and under-sampling of the training partition."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import ConfigError, RatioUnreachable
from .table import Dataset

MODES = ("none", "over", "under")


@dataclass(frozen=True)
class ResamplePlan:
    mode: str = "none"
    ratio: float = 1.0
    # "pos/neg" (default) or "pos/total"
    semantics: str = "pos/neg"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown resample mode {self.mode!r}")
        if not 0 < self.ratio <= 1:
            raise ConfigError("resample ratio must lie in (0, 1]")
        if self.semantics not in ("pos/neg", "pos/total"):
            raise ConfigError(f"unknown ratio semantics {self.semantics!r}")
        if self.semantics == "pos/total" and self.ratio >= 1:
            raise ConfigError("a pos/total ratio must be below 1")

    def pos_per_neg(self) -> Fraction:
        r = Fraction(str(self.ratio))
        return r if self.semantics == "pos/neg" else r / (1 - r)


def target_counts(pos: int, neg: int, plan: ResamplePlan) -> tuple[int, int]:
    """Class sizes after resampling, or RatioUnreachable."""
    r = plan.pos_per_neg()
    if plan.mode == "none":
        return pos, neg
    if plan.mode == "over":
        target = math.floor(r * neg)
        if target < pos:
            raise RatioUnreachable(
                f"{pos} positives already exceed the over-sampling target {target}"
            )
        return target, neg
    target = math.floor(pos / r)
    if target > neg:
        raise RatioUnreachable(f"{neg} negatives are below the under-sampling target {target}")
    return pos, target


def resample_indices(y: np.ndarray, plan: ResamplePlan, seed: int) -> np.ndarray:
    pos_idx = np.flatnonzero(y == 1)
    neg_idx = np.flatnonzero(y == 0)
    want_pos, want_neg = target_counts(len(pos_idx), len(neg_idx), plan)
    rng = np.random.default_rng(seed)
    if plan.mode == "over" and want_pos > len(pos_idx):
        if len(pos_idx) == 0:
            raise RatioUnreachable("no positive samples to duplicate")
        extra = rng.choice(pos_idx, size=want_pos - len(pos_idx), replace=True)
        return np.concatenate([np.arange(len(y)), extra])
    if plan.mode == "under" and want_neg < len(neg_idx):
        drop = rng.choice(neg_idx, size=len(neg_idx) - want_neg, replace=False)
        keep = np.ones(len(y), dtype=bool)
        keep[drop] = False
        return np.flatnonzero(keep)
    return np.arange(len(y))


def resample(train: Dataset, plan: ResamplePlan, seed: int) -> Dataset:
    """Resample a training set; duplicated rows keep their original keys."""
    idx = resample_indices(train.y, plan, seed)
    return Dataset([train.keys[i] for i in idx], train.X[idx], train.y[idx], list(train.columns))
