"""Incremental per-function process state and its 19 derived metrics."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..errors import OutOfOrderCommit
from ..inventory.functions import FunctionKey
from .git import CommitMeta


@dataclass(frozen=True)
class FunctionDelta:
    key: FunctionKey
    added: int = 0
    deleted: int = 0
    modified: int = 0
    co_changed: int = 0
    created: bool = False
    renamed_from: FunctionKey | None = None

    def __post_init__(self):
        if min(self.added, self.deleted, self.modified, self.co_changed) < 0:
            raise ValueError("delta counts must be non-negative")


@dataclass(frozen=True)
class ProcessState:
    total_added: int = 0
    total_deleted: int = 0
    total_modified: int = 0
    max_added: int = 0
    max_deleted: int = 0
    max_modified: int = 0
    max_emt: int = 0
    change_commits: int = 0
    add_commits: int = 0
    del_commits: int = 0
    mod_commits: int = 0
    emt_sum: int = 0
    contributor_set: frozenset[str] = frozenset()
    contributor_changes: int = 0
    last_author: str | None = None
    last_change_time: int | None = None
    time_gap_sum: int = 0


def update_state(state: ProcessState, meta: CommitMeta, delta: FunctionDelta) -> ProcessState:
    """Fold one commit's delta for a function into its state."""
    gap = 0
    if state.last_change_time is not None:
        if meta.timestamp < state.last_change_time:
            raise OutOfOrderCommit(
                f"commit {meta.commit_id[:12]} at {meta.timestamp} precedes last change "
                f"at {state.last_change_time}"
            )
        gap = meta.timestamp - state.last_change_time
    switched = state.last_author is not None and state.last_author != meta.author_id
    return replace(
        state,
        total_added=state.total_added + delta.added,
        total_deleted=state.total_deleted + delta.deleted,
        total_modified=state.total_modified + delta.modified,
        max_added=max(state.max_added, delta.added),
        max_deleted=max(state.max_deleted, delta.deleted),
        max_modified=max(state.max_modified, delta.modified),
        max_emt=max(state.max_emt, delta.co_changed),
        change_commits=state.change_commits + 1,
        add_commits=state.add_commits + (delta.added > 0),
        del_commits=state.del_commits + (delta.deleted > 0),
        mod_commits=state.mod_commits + (delta.modified > 0),
        emt_sum=state.emt_sum + delta.co_changed,
        contributor_set=state.contributor_set | {meta.author_id},
        contributor_changes=state.contributor_changes + switched,
        last_author=meta.author_id,
        last_change_time=meta.timestamp,
        time_gap_sum=state.time_gap_sum + gap,
    )


@dataclass(frozen=True)
class ProcessVector:
    AVGNOAL: float
    AVGNODL: float
    AVGNOEMT: float
    AVGNOML: float
    AVGTBC: float
    CChurn: int
    MNOAL: int
    MNODL: int
    MNOEMT: int
    MNOML: int
    NOADD: int
    NOCC: int
    NOCHG: int
    NOContr: int
    NODEL: int
    NOMOD: int
    SOADD: int
    SODEL: int
    SOMOD: int

    def values(self) -> list:
        return [getattr(self, name) for name in PROCESS_COLUMNS]


PROCESS_COLUMNS = [f.name for f in fields(ProcessVector)]


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def finalize(state: ProcessState) -> ProcessVector:
    n = state.change_commits
    return ProcessVector(
        AVGNOAL=_ratio(state.total_added, state.add_commits),
        AVGNODL=_ratio(state.total_deleted, state.del_commits),
        AVGNOEMT=_ratio(state.emt_sum, n),
        AVGNOML=_ratio(state.total_modified, state.mod_commits),
        AVGTBC=_ratio(state.time_gap_sum, n - 1) if n >= 2 else 0.0,
        CChurn=state.total_added - state.total_deleted,
        MNOAL=state.max_added,
        MNODL=state.max_deleted,
        MNOEMT=state.max_emt,
        MNOML=state.max_modified,
        NOADD=state.add_commits,
        NOCC=state.contributor_changes,
        NOCHG=n,
        NOContr=len(state.contributor_set),
        NODEL=state.del_commits,
        NOMOD=state.mod_commits,
        SOADD=state.total_added,
        SODEL=state.total_deleted,
        SOMOD=state.total_modified,
    )
