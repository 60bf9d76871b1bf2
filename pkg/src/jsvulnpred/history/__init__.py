"""Version-history mining: per-function process metrics."""

from __future__ import annotations

from .git import CommitMeta, Git
from .identity import track_identity
from .miner import CommitRecord, MinerConfig, MiningResult, fold, mine, process_csv, walk_history
from .state import PROCESS_COLUMNS, FunctionDelta, ProcessState, ProcessVector, finalize, update_state

__all__ = [
    "PROCESS_COLUMNS",
    "CommitMeta",
    "CommitRecord",
    "FunctionDelta",
    "Git",
    "MinerConfig",
    "MiningResult",
    "ProcessState",
    "ProcessVector",
    "finalize",
    "fold",
    "mine",
    "process_csv",
    "track_identity",
    "update_state",
    "walk_history",
]
