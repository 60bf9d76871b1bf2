"""Follow functions of one file from a revision to the next."""

from __future__ import annotations

import re
from collections import defaultdict

from ..inventory.functions import FunctionInfo, FunctionKey, SourceFile

_ANON = re.compile(r"<anon@\d+:\d+>")

DEFAULT_THRESHOLD = 0.8
MIN_BODY_TOKENS = 10


def structural_name(qualified_name: str) -> str:
    """Qualified name with the position of anonymous functions erased."""
    return _ANON.sub("<anon>", qualified_name)


def body_lexemes(sf: SourceFile, info: FunctionInfo) -> list[str]:
    """Code lexemes of a function, without its own name token."""
    skip = info.node.get("name_tok")
    return [
        sf.tokens[i].lexeme for i in range(info.first_token, info.last_token + 1) if i != skip
    ]


def trigrams(lexemes: list[str]) -> set[tuple[str, str, str]]:
    return {tuple(lexemes[i:i + 3]) for i in range(len(lexemes) - 2)}


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def track_identity(
    prev: SourceFile | None,
    nxt: SourceFile | None,
    threshold: float = DEFAULT_THRESHOLD,
    min_tokens: int = MIN_BODY_TOKENS,
) -> dict[int, int]:
    """Map function indices of ``prev`` to indices of ``nxt``.

    Matching runs in three passes: equal qualified names, then equal names
    once anonymous positions are erased (paired in source order), then
    body trigram similarity at or above ``threshold``, greedily by best score.
    Bodies shorter than ``min_tokens`` tokens only match by name.
    """
    if prev is None or nxt is None:
        return {}
    mapping: dict[int, int] = {}
    next_by_name = {info.key.qualified_name: j for j, info in enumerate(nxt.functions)}
    for i, info in enumerate(prev.functions):
        j = next_by_name.get(info.key.qualified_name)
        if j is not None:
            mapping[i] = j
    taken = set(mapping.values())

    prev_groups: dict[str, list[int]] = defaultdict(list)
    next_groups: dict[str, list[int]] = defaultdict(list)
    for i, info in enumerate(prev.functions):
        if i not in mapping and _ANON.search(info.key.qualified_name):
            prev_groups[structural_name(info.key.qualified_name)].append(i)
    for j, info in enumerate(nxt.functions):
        if j not in taken and _ANON.search(info.key.qualified_name):
            next_groups[structural_name(info.key.qualified_name)].append(j)
    for name, olds in prev_groups.items():
        for i, j in zip(olds, next_groups.get(name, [])):
            mapping[i] = j
            taken.add(j)

    rest_prev = [i for i in range(len(prev.functions)) if i not in mapping]
    rest_next = [j for j in range(len(nxt.functions)) if j not in taken]
    if not rest_prev or not rest_next:
        return mapping
    grams_next = {}
    for j in rest_next:
        lex = body_lexemes(nxt, nxt.functions[j])
        if len(lex) >= min_tokens:
            grams_next[j] = trigrams(lex)
    candidates = []
    for i in rest_prev:
        lex = body_lexemes(prev, prev.functions[i])
        if len(lex) < min_tokens:
            continue
        grams = trigrams(lex)
        for j, other in grams_next.items():
            score = jaccard(grams, other)
            if score >= threshold:
                candidates.append((-score, i, j))
    candidates.sort()
    for _, i, j in candidates:
        if i not in mapping and j not in taken:
            mapping[i] = j
            taken.add(j)
    return mapping


def key_mapping(prev: SourceFile | None, nxt: SourceFile | None, **kw) -> dict[FunctionKey, FunctionKey]:
    """Same as ``track_identity`` but keyed by FunctionKey."""
    idx = track_identity(prev, nxt, **kw)
    return {prev.functions[i].key: nxt.functions[j].key for i, j in idx.items()}
