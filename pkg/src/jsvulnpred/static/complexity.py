"""Cyclomatic complexity and nesting level of a function subtree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ..inventory.parser import Node

# construct name -> enabled by default
DEFAULT_CONSTRUCTS = {
    "if": True,
    "for": True,
    "for_in_of": True,
    "while": True,
    "do": True,
    "case": True,
    "catch": True,
    "conditional": True,
    "logical": False,  # && and ||
    "nullish": False,  # ??
}

_LOOPS = frozenset(["For", "ForIn", "ForOf", "While", "DoWhile"])


@dataclass(frozen=True)
class ComplexityConfig:
    constructs: dict[str, bool] = field(default_factory=lambda: dict(DEFAULT_CONSTRUCTS))

    def enabled(self, name: str) -> bool:
        return self.constructs.get(name, False)


@dataclass(frozen=True)
class Complexity:
    McCC: int
    NL: int
    NLE: int
    CYCL_DENS: float


def own_nodes(fn: Node) -> Iterator[Node]:
    """Nodes of ``fn`` excluding the inside of nested functions."""
    stack = list(fn.children())
    while stack:
        node = stack.pop()
        if node.type == "Function":
            continue
        yield node
        stack.extend(node.children())


def decision_token(node: Node, config: ComplexityConfig) -> int | None:
    """Token index marking ``node`` as a decision point, or None."""
    t = node.type
    if t == "If" and config.enabled("if"):
        return node.start
    if t == "For" and config.enabled("for"):
        return node.start
    if t in ("ForIn", "ForOf") and config.enabled("for_in_of"):
        return node.start
    if t == "While" and config.enabled("while"):
        return node.start
    if t == "DoWhile" and config.enabled("do"):
        return node.start
    if t == "SwitchCase" and node.test is not None and config.enabled("case"):
        return node.start
    if t == "Catch" and config.enabled("catch"):
        return node.start
    if t == "Conditional" and config.enabled("conditional"):
        return node.question
    if t == "Logical":
        if node.op in ("&&", "||") and config.enabled("logical"):
            return node.op_at
        if node.op == "??" and config.enabled("nullish"):
            return node.op_at
    return None


def decision_points(nodes, config: ComplexityConfig) -> list[int]:
    points = []
    for node in nodes:
        tok = decision_token(node, config)
        if tok is not None:
            points.append(tok)
    return sorted(points)


def mccabe(fn: Node, config: ComplexityConfig | None = None) -> int:
    return 1 + len(decision_points(own_nodes(fn), config or ComplexityConfig()))


def _is_else_if(alt: Node, flatten_braced: bool) -> Node | None:
    if alt.type == "If":
        return alt
    if flatten_braced and alt.type == "Block" and len(alt.body) == 1 and alt.body[0].type == "If":
        return alt.body[0]
    return None


def _depth(node: Node | None, depth: int, flatten_braced: bool) -> int:
    if node is None:
        return depth
    t = node.type
    best = depth

    def sub(child: Node | None, d: int) -> None:
        nonlocal best
        if child is not None:
            best = max(best, _depth(child, d, flatten_braced))

    if t == "If":
        sub(node.test, depth)
        sub(node.consequent, depth + 1)
        alt = node.alternate
        if alt is not None:
            chained = _is_else_if(alt, flatten_braced)
            if chained is not None:
                sub(chained, depth)
            else:
                sub(alt, depth + 1)
    elif t in _LOOPS:
        for name in ("init", "test", "update", "left", "right"):
            sub(node.get(name), depth)
        sub(node.body, depth + 1)
    elif t == "Switch":
        sub(node.discriminant, depth)
        for case in node.cases:
            sub(case.test, depth)
            for stmt in case.consequent:
                sub(stmt, depth + 1)
    elif t == "Try":
        sub(node.block, depth + 1)
        if node.handler is not None:
            sub(node.handler.body, depth + 1)
        sub(node.finalizer, depth + 1)
    elif t == "Function":
        for param in node.params:
            sub(param, depth)
        sub(node.body, depth + 1)
    else:
        for child in node.children():
            sub(child, depth)
    return best


def nesting_level(fn: Node, flatten_braced_else: bool = False) -> int:
    """Deepest nesting of control-structure and nested-function bodies.

    A direct ``else if`` continues the chain at the same depth. With
    ``flatten_braced_else`` an ``else { if ... }`` block holding only that
    ``if`` is treated the same way.
    """
    best = 0
    for param in fn.params:
        best = max(best, _depth(param, 0, flatten_braced_else))
    if fn.body.type == "Block":
        for stmt in fn.body.body:
            best = max(best, _depth(stmt, 0, flatten_braced_else))
    else:
        best = max(best, _depth(fn.body, 0, flatten_braced_else))
    return best


def complexity(fn: Node, lloc: int, config: ComplexityConfig | None = None) -> Complexity:
    mccc = mccabe(fn, config)
    return Complexity(
        McCC=mccc,
        NL=nesting_level(fn, flatten_braced_else=False),
        NLE=nesting_level(fn, flatten_braced_else=True),
        CYCL_DENS=mccc / lloc if lloc else 0.0,
    )
