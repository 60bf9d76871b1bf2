"""Labeled dataset construction, splitting and resampling."""

from __future__ import annotations

from .labels import FixRecord, LabelResult, label_files, label_from_fix, labels_csv, load_fixes
from .resample import ResamplePlan, resample
from .split import SplitSpec, fold_indices, folds, largest_remainder, split, split_indices
from .table import (
    FEATURE_COLUMNS,
    Dataset,
    JoinReport,
    SampleKey,
    concat,
    dataset_csv,
    join,
    read_dataset,
    read_external_dataset,
)

__all__ = [
    "FEATURE_COLUMNS",
    "Dataset",
    "FixRecord",
    "JoinReport",
    "LabelResult",
    "ResamplePlan",
    "SampleKey",
    "SplitSpec",
    "concat",
    "dataset_csv",
    "fold_indices",
    "folds",
    "join",
    "label_files",
    "label_from_fix",
    "labels_csv",
    "largest_remainder",
    "load_fixes",
    "read_dataset",
    "read_external_dataset",
    "resample",
    "split",
    "split_indices",
]
