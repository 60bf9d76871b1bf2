"""Walk the first-parent chain and derive per-function deltas per commit."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple

from ..errors import JsVulnError, UnreadableBlob
from ..inventory.functions import FunctionKey, SourceFile, parse_source
from .diff import Hunk, pair_lines, parse_hunks, whole_file_hunk
from .git import DEFAULT_EXCLUDES, CommitMeta, FileChange, Git, is_js_path
from .identity import DEFAULT_THRESHOLD, MIN_BODY_TOKENS, track_identity
from .state import PROCESS_COLUMNS, FunctionDelta, ProcessState, ProcessVector, finalize, update_state

log = logging.getLogger(__name__)


class CommitRecord(NamedTuple):
    meta: CommitMeta
    deltas: list[FunctionDelta]
    moved: dict[FunctionKey, FunctionKey]  # surviving keys whose identity changed
    removed: list[FunctionKey]  # keys whose state ends here


@dataclass
class MinerConfig:
    similarity: float = DEFAULT_THRESHOLD
    min_tokens: int = MIN_BODY_TOKENS
    excludes: tuple[str, ...] = DEFAULT_EXCLUDES


@dataclass
class FileDeltas:
    counts: dict[int, list[int]] = field(default_factory=dict)  # post index -> [add, del, mod]

    def bump(self, j: int, slot: int) -> None:
        self.counts.setdefault(j, [0, 0, 0])[slot] += 1


def _innermost(sf: SourceFile, line: int) -> int | None:
    best = None
    for j, info in enumerate(sf.functions):
        span = info.key.span
        if span.start_line <= line <= span.end_line:
            if best is None or span.line_count <= sf.functions[best].key.span.line_count:
                best = j
    return best


def attribute_hunks(
    old: SourceFile | None, new: SourceFile | None, hunks: list[Hunk], mapping: dict[int, int]
) -> dict[int, list[int]]:
    """Line counts (added, deleted, modified) per post-image function index.

    Paired lines and surplus added lines go to the innermost post-image
    function holding the new line. Surplus deleted lines go to the innermost
    pre-image function holding the old line, if that function survives.
    """
    acc = FileDeltas()
    for hunk in hunks:
        events = pair_lines(hunk)
        for _, n in events.modified:
            j = _innermost(new, n) if new else None
            if j is not None:
                acc.bump(j, 2)
        for n in events.added:
            j = _innermost(new, n) if new else None
            if j is not None:
                acc.bump(j, 0)
        for o in events.deleted:
            i = _innermost(old, o) if old else None
            if i is not None and i in mapping:
                acc.bump(mapping[i], 1)
    return acc.counts


class HistoryWalker:
    def __init__(self, git: Git, config: MinerConfig | None = None):
        self.git = git
        self.config = config or MinerConfig()
        self.current: dict[str, SourceFile] = {}
        self.diagnostics: list[str] = []

    def _parse(self, blob: str, path: str) -> SourceFile | None:
        try:
            source = self.git.read_blob(blob)
        except UnreadableBlob as exc:
            self.diagnostics.append(f"{path}: {exc}")
            return None
        sf = parse_source(source, path)
        for err in sf.errors:
            self.diagnostics.append(f"{path}@{blob[:12]}: {err}")
        return sf

    def _js(self, path: str | None) -> bool:
        return is_js_path(path, self.config.excludes)

    def file_change(self, change: FileChange, deltas: list[FunctionDelta], moved, removed) -> None:
        old_path = change.old_path if self._js(change.old_path) else None
        new_path = change.new_path if self._js(change.new_path) else None
        if old_path is None and new_path is None:
            return
        old = self.current.pop(old_path, None) if old_path else None
        if old is None and old_path and change.old_blob:
            old = self._parse(change.old_blob, old_path)
        new = self._parse(change.new_blob, new_path) if new_path and change.new_blob else None
        mapping = track_identity(
            old, new, threshold=self.config.similarity, min_tokens=self.config.min_tokens
        )
        if old is not None and new is not None:
            hunks = parse_hunks(self.git.diff_blobs(change.old_blob, change.new_blob))
        else:
            hunks = whole_file_hunk(old.source if old else None, new.source if new else None)
        counts = attribute_hunks(old, new, hunks, mapping)

        if old is not None:
            for i, info in enumerate(old.functions):
                if i not in mapping:
                    removed.append(info.key)
                elif new.functions[mapping[i]].key != info.key:
                    moved[info.key] = new.functions[mapping[i]].key
        if new is None:
            return
        self.current[new_path] = new
        survivors = {j: i for i, j in mapping.items()}
        for j, info in enumerate(new.functions):
            if j not in survivors:
                deltas.append(FunctionDelta(info.key, added=info.key.span.line_count, created=True))
                continue
            prev = old.functions[survivors[j]]
            renamed = (
                prev.name != info.name and not prev.synthetic and not info.synthetic
            )
            add, dele, mod = counts.get(j, (0, 0, 0))
            if add + dele + mod > 0 or renamed:
                deltas.append(
                    FunctionDelta(
                        info.key, add, dele, mod,
                        renamed_from=prev.key if renamed else None,
                    )
                )

    def commit(self, meta: CommitMeta) -> CommitRecord:
        parent = meta.parents[0] if meta.parents else None
        deltas: list[FunctionDelta] = []
        moved: dict[FunctionKey, FunctionKey] = {}
        removed: list[FunctionKey] = []
        changes = self.git.changes(parent, meta.commit_id)
        # process removals and renames first so a path freed and reused in
        # the same commit is not clobbered
        changes.sort(key=lambda c: (c.status not in ("D", "R"), c.old_path or "", c.new_path or ""))
        for change in changes:
            self.file_change(change, deltas, moved, removed)
        deltas.sort(key=lambda d: d.key)
        co = len(deltas) - 1
        deltas = [replace(d, co_changed=co) for d in deltas]
        return CommitRecord(meta, deltas, moved, sorted(removed))

    def walk(self, until: str | None = None) -> Iterable[CommitRecord]:
        last = None
        for meta in self.git.first_parent_chain(until):
            if last is not None and meta.timestamp < last:
                # clock skew: keep the chain order authoritative
                meta = replace(meta, timestamp=last)
            last = meta.timestamp
            yield self.commit(meta)


def walk_history(repo: str, until: str | None = None, config: MinerConfig | None = None) -> list[CommitRecord]:
    with Git(repo) as git:
        return list(HistoryWalker(git, config).walk(until))


def fold(records: Iterable[CommitRecord]) -> dict[FunctionKey, ProcessState]:
    """Apply commit records in order to a state table keyed by current identity."""
    states: dict[FunctionKey, ProcessState] = {}
    for rec in records:
        gone = set(rec.removed)
        if gone or rec.moved:
            states = {rec.moved.get(k, k): v for k, v in states.items() if k not in gone}
        for delta in rec.deltas:
            states[delta.key] = update_state(states.get(delta.key, ProcessState()), rec.meta, delta)
    return states


@dataclass
class MiningResult:
    rows: list[tuple[FunctionKey, ProcessVector]]
    diagnostics: list[str]
    commits: int


def mine(repo: str, until: str | None = None, config: MinerConfig | None = None) -> MiningResult:
    """Process vectors of every function alive at ``until`` (or HEAD)."""
    with Git(repo) as git:
        walker = HistoryWalker(git, config)
        records = list(walker.walk(until))
        states = fold(records)
        rows = []
        for path in sorted(walker.current):
            for info in walker.current[path].functions:
                state = states.get(info.key)
                if state is None:
                    raise JsVulnError(f"no history state for {info.key}")
                rows.append((info.key, finalize(state)))
        return MiningResult(rows, walker.diagnostics, len(records))


def process_csv(rows: Iterable[tuple[FunctionKey, ProcessVector]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "qualified_name", "start_line", "end_line"] + PROCESS_COLUMNS)
    for key, vec in rows:
        writer.writerow(
            [key.file_path, key.qualified_name, key.span.start_line, key.span.end_line]
            + [repr(round(v, 10)) if isinstance(v, float) else v for v in vec.values()]
        )
    return buf.getvalue()
