"""Type-2 clone detection over normalized token windows.

Identifiers become ``$id`` and literals ``$lit``; every other token keeps its
lexeme. Each file contributes the windows of ``W`` consecutive normalized
tokens (windows never cross a file boundary). A window is duplicated when an
identical window exists elsewhere in the project. Overlapping duplicated
windows of one file merge into a clone instance, and instances linked by a
shared window form a clone class.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass

from ..inventory.functions import SourceFile
from ..inventory.lexer import IDENTIFIER, LITERAL, Token
from .complexity import ComplexityConfig, decision_points

_MASK = (1 << 64) - 1
_BASE = 1_000_003


def normalize(tok: Token) -> str:
    if tok.kind == IDENTIFIER:
        return "$id"
    if tok.kind == LITERAL:
        return "$lit"
    return tok.lexeme


@dataclass(frozen=True)
class CloneInstance:
    file: int
    first: int  # inclusive code-token indices
    last: int


@dataclass(frozen=True)
class CloneMetrics:
    CC: float = 0.0
    CCL: int = 0
    CCO: int = 0
    CI: int = 0
    CLC: float = 0.0
    LDC: int = 0


def _encode(files: list[SourceFile]) -> list[list[int]]:
    vocab: dict[str, int] = {}
    return [[vocab.setdefault(normalize(t), len(vocab) + 1) for t in sf.tokens] for sf in files]


def _window_hashes(seq: list[int], width: int) -> list[int]:
    if len(seq) < width:
        return []
    top = pow(_BASE, width - 1, 1 << 64)
    h = 0
    for x in seq[:width]:
        h = (h * _BASE + x) & _MASK
    out = [h]
    for s in range(1, len(seq) - width + 1):
        h = ((h - seq[s - 1] * top) * _BASE + seq[s + width - 1]) & _MASK
        out.append(h)
    return out


def duplicate_groups(seqs: list[list[int]], width: int) -> list[list[tuple[int, int]]]:
    """Groups of identical windows, each as a list of (file, start), size ≥ 2."""
    buckets: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for f, seq in enumerate(seqs):
        for s, h in enumerate(_window_hashes(seq, width)):
            buckets[h].append((f, s))
    groups = []
    for members in buckets.values():
        if len(members) < 2:
            continue
        # rule out hash collisions by comparing the actual windows
        exact: dict[tuple[int, ...], list[tuple[int, int]]] = defaultdict(list)
        for f, s in members:
            exact[tuple(seqs[f][s:s + width])].append((f, s))
        groups.extend(g for g in exact.values() if len(g) >= 2)
    groups.sort()
    return groups


def merge_windows(starts: list[int], width: int) -> list[tuple[int, int]]:
    """Merge sorted window starts into maximal runs of overlapping windows."""
    runs: list[tuple[int, int]] = []
    for s in starts:
        end = s + width - 1
        if runs and s <= runs[-1][1]:
            runs[-1] = (runs[-1][0], max(runs[-1][1], end))
        else:
            runs.append((s, end))
    return runs


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class CloneReport:
    instances: list[CloneInstance]
    classes: list[int]  # class id per instance
    metrics: dict[tuple[int, int], CloneMetrics]  # (file, function) -> metrics


def find_instances(files: list[SourceFile], width: int) -> tuple[list[CloneInstance], list[int]]:
    seqs = _encode(files)
    groups = duplicate_groups(seqs, width)
    starts: dict[int, set[int]] = defaultdict(set)
    for group in groups:
        for f, s in group:
            starts[f].add(s)
    instances: list[CloneInstance] = []
    first_of: dict[int, list[int]] = {}
    offset: dict[int, int] = {}
    for f in sorted(starts):
        offset[f] = len(instances)
        runs = merge_windows(sorted(starts[f]), width)
        instances.extend(CloneInstance(f, lo, hi) for lo, hi in runs)
        first_of[f] = [lo for lo, _ in runs]

    def owner(f: int, s: int) -> int:
        return offset[f] + bisect.bisect_right(first_of[f], s) - 1

    uf = _UnionFind(len(instances))
    for group in groups:
        head = owner(*group[0])
        for f, s in group[1:]:
            uf.union(head, owner(f, s))
    roots = [uf.find(i) for i in range(len(instances))]
    ids: dict[int, int] = {}
    classes = [ids.setdefault(r, len(ids)) for r in roots]
    return instances, classes


def clones(
    files: list[SourceFile],
    width: int = 50,
    config: ComplexityConfig | None = None,
) -> CloneReport:
    """Clone metrics for every function of the project."""
    if width < 1:
        raise ValueError("clone window must be at least one token")
    config = config or ComplexityConfig()
    instances, classes = find_instances(files, width)
    by_file: dict[int, list[int]] = defaultdict(list)
    for i, inst in enumerate(instances):
        by_file[inst.file].append(i)

    metrics: dict[tuple[int, int], CloneMetrics] = {}
    for f, sf in enumerate(files):
        mine = by_file.get(f, [])
        points = decision_points(sf.program.walk(), config) if mine else []
        inst_mccabe = {
            i: 1 + bisect.bisect_right(points, instances[i].last)
            - bisect.bisect_left(points, instances[i].first)
            for i in mine
        }
        for k, info in enumerate(sf.functions):
            lo, hi = info.first_token, info.last_token
            hits = [i for i in mine if instances[i].first <= hi and instances[i].last >= lo]
            if not hits:
                metrics[(f, k)] = CloneMetrics()
                continue
            lines: set[int] = set()
            for i in hits:
                for t in range(max(lo, instances[i].first), min(hi, instances[i].last) + 1):
                    tok = sf.tokens[t]
                    lines.update(range(tok.line, tok.end_line + 1))
            coverage = len(lines) / info.key.span.line_count
            metrics[(f, k)] = CloneMetrics(
                CC=coverage,
                CCL=len({classes[i] for i in hits}),
                CCO=sum(inst_mccabe[i] for i in hits),
                CI=len(hits),
                CLC=coverage,
                LDC=len(lines),
            )
    return CloneReport(instances, classes, metrics)
