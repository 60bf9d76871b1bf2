"""Line, statement and comment counts for one function.

Plain metrics cover the function itself; the ``T`` variants also include
every nested function. A line that only belongs to a nested function is
excluded from the plain counts.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..inventory.functions import FunctionInfo, SourceFile
from ..inventory.lexer import Token
from ..inventory.parser import Node

STATEMENT_TYPES = frozenset(
    """
    ExpressionStatement VarDecl If For ForIn ForOf While DoWhile Switch Try
    Return Throw Break Continue Debugger With Import Export
    """.split()
)


@dataclass(frozen=True)
class SizeMetrics:
    LOC: int
    TLOC: int
    LLOC: int
    TLLOC: int
    NOS: int
    TNOS: int
    CLOC: int
    TCLOC: int
    DLOC: int
    CD: float
    TCD: float
    NUMPAR: int


def _lines(tok: Token) -> range:
    return range(tok.line, tok.end_line + 1)


def count_statements(fn: Node, nested: bool) -> int:
    """Statements of ``fn``; ``nested`` also counts inside nested functions.

    A nested function declaration is a statement of its enclosing function,
    and an arrow with an expression body counts one implicit return. A
    declaration in a loop head is part of the loop, not a statement.
    """
    count = 1 if fn.expression_body else 0
    stack = list(fn.children())
    heads: set[int] = set()
    while stack:
        node = stack.pop()
        if node.type in ("For", "ForIn", "ForOf"):
            heads.update(id(node.get(name)) for name in ("init", "left") if node.get(name) is not None)
        if id(node) in heads:
            stack.extend(node.children())
            continue
        if node.type == "Function":
            if node.kind == "declaration":
                count += 1
            if nested:
                count += 1 if node.expression_body else 0
                stack.extend(node.children())
            continue
        if node.type in STATEMENT_TYPES or (node.type == "Class" and node.declaration):
            count += 1
        stack.extend(node.children())
    return count


def nested_ranges(sf: SourceFile, info: FunctionInfo) -> list[tuple[int, int]]:
    return [
        (sf.functions[c].first_token, sf.functions[c].last_token) for c in info.children
    ]


def own_token_indices(sf: SourceFile, info: FunctionInfo) -> list[int]:
    """Indices of code tokens that belong to ``info`` and no nested function."""
    ranges = nested_ranges(sf, info)
    out = []
    i = info.first_token
    while i <= info.last_token:
        for lo, hi in ranges:
            if lo <= i <= hi:
                i = hi + 1
                break
        else:
            out.append(i)
            i += 1
    return out


def _comments_between(sf: SourceFile, first: int, last: int) -> list[Token]:
    lo = sf.stream_index[first]
    hi = sf.stream_index[last]
    return [t for t in sf.stream.tokens[lo:hi + 1] if t.is_comment]


def doc_lines(sf: SourceFile, info: FunctionInfo) -> int:
    """Lines of the comment block directly preceding the function."""
    stream = sf.stream.tokens
    j = sf.stream_index[info.first_token] - 1
    start_line = sf.tokens[info.first_token].line
    # skip the declaration prefix on the same line, e.g. "var f =" or "export"
    while j >= 0 and not stream[j].is_comment and stream[j].end_line == start_line:
        start_line = stream[j].line
        j -= 1
    lines: set[int] = set()
    next_line = start_line
    while j >= 0 and stream[j].is_comment and stream[j].end_line >= next_line - 1:
        lines.update(_lines(stream[j]))
        next_line = stream[j].line
        j -= 1
    return len(lines)


def size_and_comments(sf: SourceFile, info: FunctionInfo) -> SizeMetrics:
    span = info.key.span
    tokens = sf.tokens
    own = own_token_indices(sf, info)

    own_code_lines: set[int] = set()
    for i in own:
        own_code_lines.update(_lines(tokens[i]))
    all_code_lines: set[int] = set()
    for i in range(info.first_token, info.last_token + 1):
        all_code_lines.update(_lines(tokens[i]))

    nested = nested_ranges(sf, info)
    nested_lines: set[int] = set()
    for lo, hi in nested:
        nested_lines.update(range(tokens[lo].line, tokens[hi].end_line + 1))

    comments = _comments_between(sf, info.first_token, info.last_token)
    all_comment_lines: set[int] = set()
    own_comment_lines: set[int] = set()
    for c in comments:
        all_comment_lines.update(_lines(c))
        inside_nested = any(
            (tokens[lo].line, tokens[lo].col) < (c.line, c.col) < (tokens[hi].line, tokens[hi].col)
            for lo, hi in nested
        )
        if not inside_nested:
            own_comment_lines.update(_lines(c))

    span_lines = set(range(span.start_line, span.end_line + 1))
    own_lines = (span_lines - nested_lines) | (nested_lines & (own_code_lines | own_comment_lines))

    lloc, tlloc = len(own_code_lines), len(all_code_lines)
    cloc, tcloc = len(own_comment_lines), len(all_comment_lines)
    return SizeMetrics(
        LOC=len(own_lines),
        TLOC=span.line_count,
        LLOC=lloc,
        TLLOC=tlloc,
        NOS=count_statements(info.node, nested=False),
        TNOS=count_statements(info.node, nested=True),
        CLOC=cloc,
        TCLOC=tcloc,
        DLOC=doc_lines(sf, info),
        CD=cloc / (cloc + lloc) if cloc + lloc else 0.0,
        TCD=tcloc / (tcloc + tlloc) if tcloc + tlloc else 0.0,
        NUMPAR=info.num_params,
    )
