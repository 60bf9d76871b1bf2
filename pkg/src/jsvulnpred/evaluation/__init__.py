"""Scoring, significance testing and result reporting."""

from __future__ import annotations

from .mcnemar import ContingencyTable, McNemarResult, build_contingency, chi2_sf_1, mcnemar
from .measures import ConfusionMatrix, IRMetrics, confusion, ir_measures
from .search import GridResult, cross_validate, grid_search, rank

__all__ = [
    "ConfusionMatrix",
    "ContingencyTable",
    "GridResult",
    "IRMetrics",
    "McNemarResult",
    "build_contingency",
    "chi2_sf_1",
    "confusion",
    "cross_validate",
    "grid_search",
    "ir_measures",
    "mcnemar",
    "rank",
]
