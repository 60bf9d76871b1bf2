"""Zero-context unified diff hunks and line pairing."""

from __future__ import annotations

import re
from dataclasses import dataclass

_HUNK = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass(frozen=True)
class Hunk:
    """One hunk; for an empty side ``start`` is the line the change follows."""

    old_start: int
    old_count: int
    new_start: int
    new_count: int

    @property
    def deleted_lines(self) -> range:
        return range(self.old_start, self.old_start + self.old_count)

    @property
    def added_lines(self) -> range:
        return range(self.new_start, self.new_start + self.new_count)

    @property
    def modified(self) -> int:
        """Deleted lines paired with added lines, in order, count as modified."""
        return min(self.old_count, self.new_count)


def parse_hunks(diff_text: str) -> list[Hunk]:
    hunks = []
    for line in diff_text.splitlines():
        m = _HUNK.match(line)
        if m:
            a, b, c, d = m.groups()
            hunks.append(
                Hunk(int(a), 1 if b is None else int(b), int(c), 1 if d is None else int(d))
            )
    return hunks


def line_count(text: str) -> int:
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


def whole_file_hunk(old_text: str | None, new_text: str | None) -> list[Hunk]:
    """Hunks for a file that was created (old None) or removed (new None)."""
    old_n = line_count(old_text or "")
    new_n = line_count(new_text or "")
    if old_n == 0 and new_n == 0:
        return []
    return [Hunk(1 if old_n else 0, old_n, 1 if new_n else 0, new_n)]


@dataclass(frozen=True)
class LineEvents:
    """Per-hunk line roles after pairing."""

    modified: list[tuple[int, int]]  # (old line, new line)
    added: list[int]  # new-side lines
    deleted: list[int]  # old-side lines


def pair_lines(hunk: Hunk) -> LineEvents:
    old = list(hunk.deleted_lines)
    new = list(hunk.added_lines)
    k = min(len(old), len(new))
    return LineEvents(list(zip(old[:k], new[:k])), new[k:], old[k:])
