"""Function inventory: qualified names and source spans for every function."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import JsVulnError
from .lexer import LITERAL, Token, TokenStream, tokenize
from .parser import Node, parse


@dataclass(frozen=True, order=True)
class SourceSpan:
    start_line: int
    end_line: int
    start_col: int = 0
    end_col: int = 0

    def __post_init__(self):
        if self.start_line > self.end_line or self.start_col < 0 or self.end_col < 0:
            raise ValueError(f"invalid span {self}")

    @property
    def line_count(self) -> int:
        return self.end_line - self.start_line + 1

    def contains_line(self, line: int) -> bool:
        return self.start_line <= line <= self.end_line


@dataclass(frozen=True, order=True)
class FunctionKey:
    file_path: str
    qualified_name: str
    span: SourceSpan

    @property
    def ident(self) -> tuple[str, str]:
        """Span-free identity used to follow a function across revisions."""
        return self.file_path, self.qualified_name


@dataclass
class FunctionInfo:
    key: FunctionKey
    name: str  # terminal name without disambiguation suffix
    node: Node
    parent: int | None  # index into SourceFile.functions
    first_token: int  # inclusive range over code tokens
    last_token: int
    synthetic: bool = False
    children: list[int] = field(default_factory=list)

    @property
    def num_params(self) -> int:
        return len(self.node.params)


@dataclass
class SourceFile:
    path: str
    source: str
    stream: TokenStream
    tokens: list[Token]  # code tokens, indices used by AST nodes
    program: Node
    functions: list[FunctionInfo]
    errors: list[JsVulnError]
    stream_index: list[int] = field(default_factory=list)  # code token -> stream position

    @property
    def recovered(self) -> bool:
        return bool(self.errors)

    def keys(self) -> list[FunctionKey]:
        return [f.key for f in self.functions]

    def innermost_at_line(self, line: int) -> FunctionInfo | None:
        """Innermost function whose span contains ``line``."""
        best = None
        for info in self.functions:
            if info.key.span.contains_line(line):
                if best is None or info.key.span.line_count <= best.key.span.line_count:
                    best = info
        return best


def anon_name(tok: Token) -> str:
    return f"<anon@{tok.line}:{tok.col}>"


def _literal_name(node: Node | None, tokens: list[Token]) -> str | None:
    if node is None:
        return None
    if node.type == "Key":
        return node.name
    if node.type == "ComputedKey":
        return _literal_name(node.expression, tokens)
    if node.type == "Literal":
        lex = node.value
        if lex[:1] in "'\"" and len(lex) >= 2:
            return lex[1:-1]
        return None
    if node.type == "Template" and not node.expressions:
        lex = tokens[node.start].lexeme
        return lex[1:-1]
    return None


def _target_name(node: Node | None, tokens: list[Token]) -> str | None:
    """Name a function inherits from the target it is bound to."""
    if node is None:
        return None
    if node.type == "Identifier":
        return node.name
    if node.type == "Member":
        if node.computed:
            return _literal_name(node.property, tokens)
        return node.property.name
    return None


class _Collector:
    def __init__(self, path: str, tokens: list[Token]):
        self.path = path
        self.tokens = tokens
        self.functions: list[FunctionInfo] = []
        self.seen: dict[str, int] = {}

    def visit(self, node: Node | None, scope: list[str], fn: int | None, hint: str | None = None):
        if node is None:
            return
        t = node.type
        if t == "Function":
            self.function(node, scope, fn, hint)
            return
        if t == "Class":
            name = None
            if node.name_tok is not None:
                name = self.tokens[node.name_tok].lexeme
            name = name or node.default_name or hint or anon_name(self.tokens[node.start])
            if node.superclass is not None:
                self.visit(node.superclass, scope, fn)
            inner = scope + [name]
            for member in node.members:
                if member.type == "Function":
                    self.visit(member, inner, fn, _literal_name(member.key, self.tokens))
                else:
                    self.visit(member.key, inner, fn)
                    self.visit(member.value, inner, fn, _literal_name(member.key, self.tokens))
            return
        if t == "Object":
            inner = scope + [hint] if hint else scope
            for prop in node.properties:
                if prop.type == "Function":
                    self.visit(prop, inner, fn, _literal_name(prop.key, self.tokens))
                elif prop.type == "Property":
                    self.visit(prop.key, inner, fn)
                    self.visit(prop.value, inner, fn, _literal_name(prop.key, self.tokens))
                else:
                    self.visit(prop, inner, fn)
            return
        if t == "Declarator":
            self.visit(node.target, scope, fn)
            self.visit(node.init, scope, fn, _target_name(node.target, self.tokens))
            return
        if t == "Assign":
            self.visit(node.target, scope, fn)
            self.visit(node.value, scope, fn, _target_name(node.target, self.tokens))
            return
        if t == "Paren":
            self.visit(node.expression, scope, fn, hint)
            return
        if t == "ExportDefault":
            self.visit(node.expression, scope, fn, "default")
            return
        for child in node.children():
            self.visit(child, scope, fn)

    def function(self, node: Node, scope: list[str], parent: int | None, hint: str | None):
        start_tok = self.tokens[node.start]
        synthetic = False
        if node.name_tok is not None:
            name = self.tokens[node.name_tok].lexeme
        elif node.get("default_name"):
            name = node.default_name
        elif hint:
            name = hint
        else:
            name = anon_name(start_tok)
            synthetic = True
        qualified = ".".join(scope + [name])
        count = self.seen.get(qualified, 0) + 1
        self.seen[qualified] = count
        segment = name if count == 1 else f"{name}#{count}"
        qualified = ".".join(scope + [segment])
        end_tok = self.tokens[node.end]
        span = SourceSpan(start_tok.line, end_tok.end_line, start_tok.col, end_tok.end_col)
        info = FunctionInfo(
            key=FunctionKey(self.path, qualified, span),
            name=name,
            node=node,
            parent=parent,
            first_token=node.start,
            last_token=node.end,
            synthetic=synthetic,
        )
        index = len(self.functions)
        self.functions.append(info)
        if parent is not None:
            self.functions[parent].children.append(index)
        inner = scope + [segment]
        for param in node.params:
            self.visit(param, inner, index)
        self.visit(node.body, inner, index)


def parse_source(source: str, path: str = "") -> SourceFile:
    """Tokenize and parse ``source`` and build its function inventory."""
    stream = tokenize(source)
    program, tokens, parse_errors = parse(stream.tokens)
    collector = _Collector(path, tokens)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 6000))
    try:
        collector.visit(program, [], None)
    finally:
        sys.setrecursionlimit(limit)
    errors: list[JsVulnError] = [*stream.errors, *parse_errors]
    stream_index = [i for i, tok in enumerate(stream.tokens) if not tok.is_comment]
    return SourceFile(path, source, stream, tokens, program, collector.functions, errors, stream_index)


def extract_functions(source: str, path: str = "") -> list[FunctionKey]:
    """Return a key for every function in ``source`` in source order."""
    return parse_source(source, path).keys()


def span_overlaps(fk: FunctionKey, lines: Iterable[int]) -> bool:
    """True iff any (1-based) line lies within the function span, inclusive."""
    span = fk.span
    return any(span.start_line <= line <= span.end_line for line in lines)


def dump_functions(files: Iterable[SourceFile]) -> str:
    """Serialize inventories in the ``functions.json`` layout."""
    rows = [
        {
            "path": info.key.file_path,
            "name": info.key.qualified_name,
            "start_line": info.key.span.start_line,
            "end_line": info.key.span.end_line,
        }
        for sf in files
        for info in sf.functions
    ]
    return json.dumps(rows, indent=2)


def is_string_literal(tok: Token) -> bool:
    return tok.kind == LITERAL and tok.lexeme[:1] in "'\""
