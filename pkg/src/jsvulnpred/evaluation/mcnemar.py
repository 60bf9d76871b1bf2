"""McNemar's test for two classifiers evaluated on the same samples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from ..errors import LengthMismatch


@dataclass(frozen=True)
class ContingencyTable:
    """Cells: both correct, only A correct, only B correct, both wrong."""

    both_correct: int
    a_only: int
    b_only: int
    both_wrong: int

    @property
    def ct(self) -> list[list[int]]:
        return [[self.both_correct, self.a_only], [self.b_only, self.both_wrong]]

    @property
    def total(self) -> int:
        return self.both_correct + self.a_only + self.b_only + self.both_wrong

    @classmethod
    def from_cells(cls, ct: Sequence[Sequence[int]]) -> "ContingencyTable":
        return cls(int(ct[0][0]), int(ct[0][1]), int(ct[1][0]), int(ct[1][1]))


@dataclass(frozen=True)
class McNemarResult:
    statistic: float
    p_value: float
    alpha: float
    decision: str  # "rejected" or "accepted"
    method: str = "chi2"


def build_contingency(truth, preds_a, preds_b) -> ContingencyTable:
    t = np.asarray(truth, dtype=int).ravel()
    a = np.asarray(preds_a, dtype=int).ravel()
    b = np.asarray(preds_b, dtype=int).ravel()
    if not len(t) == len(a) == len(b):
        raise LengthMismatch(f"lengths differ: truth {len(t)}, A {len(a)}, B {len(b)}")
    ra, rb = a == t, b == t
    return ContingencyTable(
        int(np.sum(ra & rb)), int(np.sum(ra & ~rb)), int(np.sum(~ra & rb)), int(np.sum(~ra & ~rb))
    )


def chi2_sf_1(statistic: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    return float(stats.chi2.sf(statistic, df=1))


def mcnemar(table: ContingencyTable, alpha: float = 0.05, exact: bool = False) -> McNemarResult:
    """Uncorrected chi-square McNemar test, or the exact binomial variant.

    The chi-square statistic is ``(b - c)^2 / (b + c)`` on the two
    discordant cells. The exact variant reports ``min(b, c)`` as statistic
    and a two-sided binomial p-value with success probability 1/2.
    """
    b, c = table.a_only, table.b_only
    if b + c == 0:
        stat, p = 0.0, 1.0
    elif exact:
        stat = float(min(b, c))
        p = float(min(1.0, 2.0 * stats.binom.cdf(min(b, c), b + c, 0.5)))
    else:
        stat = (b - c) ** 2 / (b + c)
        p = chi2_sf_1(stat)
    decision = "rejected" if p <= alpha else "accepted"
    return McNemarResult(float(stat), p, alpha, decision, "exact" if exact else "chi2")
