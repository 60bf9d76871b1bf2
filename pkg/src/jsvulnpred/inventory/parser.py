"""Recursive-descent parser for a pragmatic ES2017 subset.

The goal is function-boundary detection plus the handful of structural facts
the static metrics need (statements, control flow, calls), not a validating
ECMAScript front end. Nodes are generic :class:`Node` objects whose ``start``
and ``end`` are inclusive indices into the comment-free token list.

Errors inside a statement are recorded and parsing resumes at the next
statement boundary found by skipping balanced bracket groups.
"""

from __future__ import annotations

import sys
from typing import Iterator

from ..errors import ParseError
from .lexer import COMMENT, IDENTIFIER, KEYWORD, LITERAL, Token

BINARY_PRECEDENCE = {
    "??": 1, "||": 2, "&&": 3, "|": 4, "^": 5, "&": 6,
    "==": 7, "!=": 7, "===": 7, "!==": 7,
    "<": 8, ">": 8, "<=": 8, ">=": 8, "instanceof": 8, "in": 8,
    "<<": 9, ">>": 9, ">>>": 9,
    "+": 10, "-": 10, "*": 11, "/": 11, "%": 11, "**": 12,
}
LOGICAL = frozenset(["&&", "||", "??"])
ASSIGNMENT = frozenset(
    "= += -= *= /= %= **= <<= >>= >>>= &= |= ^= &&= ||= ??=".split()
)
UNARY = frozenset(["!", "~", "+", "-", "typeof", "void", "delete"])
OPENERS = {"(": ")", "[": "]", "{": "}"}
CLOSERS = frozenset(OPENERS.values())

_EXPR_START_KEYWORDS = frozenset(
    "this function new class super typeof void delete yield import".split()
)


class Node:
    """Generic AST node; extra fields are stored in ``fields``."""

    __slots__ = ("type", "start", "end", "fields")

    def __init__(self, type: str, start: int, end: int = -1, **fields):
        self.type = type
        self.start = start
        self.end = end
        self.fields = fields

    def __getattr__(self, name: str):
        try:
            return self.fields[name]
        except KeyError:
            raise AttributeError(name) from None

    def get(self, name: str, default=None):
        return self.fields.get(name, default)

    def children(self) -> Iterator["Node"]:
        for value in self.fields.values():
            if isinstance(value, Node):
                yield value
            elif isinstance(value, list):
                for item in value:
                    if isinstance(item, Node):
                        yield item

    def walk(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children())))

    def __repr__(self) -> str:
        return f"Node({self.type}, {self.start}..{self.end})"


def match_brackets(tokens: list[Token]) -> dict[int, int]:
    """Map each bracket index to its partner; unbalanced ones are omitted."""
    pairs: dict[int, int] = {}
    stack: list[int] = []
    for i, tok in enumerate(tokens):
        if tok.kind == LITERAL or tok.kind == COMMENT:
            continue
        lex = tok.lexeme
        if lex in OPENERS:
            stack.append(i)
        elif lex in CLOSERS:
            # pop until a matching opener; unmatched closers are dropped
            for depth in range(len(stack) - 1, -1, -1):
                if OPENERS[tokens[stack[depth]].lexeme] == lex:
                    opener = stack[depth]
                    del stack[depth:]
                    pairs[opener] = i
                    pairs[i] = opener
                    break
    return pairs


class Parser:
    def __init__(self, tokens: list[Token]):
        self.t = [tok for tok in tokens if tok.kind != COMMENT]
        self.n = len(self.t)
        self.i = 0
        self.pairs = match_brackets(self.t)
        self.errors: list[ParseError] = []

    # -- token helpers ---------------------------------------------------

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.t[j] if j < self.n else None

    def at(self, lexeme: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.kind != LITERAL and tok.lexeme == lexeme

    def at_ident(self, k: int = 0, name: str | None = None) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.kind == IDENTIFIER and (name is None or tok.lexeme == name)

    def newline_before(self, j: int | None = None) -> bool:
        j = self.i if j is None else j
        return 0 < j < self.n and self.t[j].line > self.t[j - 1].end_line

    def error(self, message: str, j: int | None = None) -> ParseError:
        j = self.i if j is None else j
        if j < self.n:
            tok = self.t[j]
            return ParseError(message, tok.line, tok.col)
        last = self.t[-1] if self.t else None
        return ParseError(message, last.end_line if last else 1, last.end_col if last else 0)

    def expect(self, lexeme: str) -> int:
        if not self.at(lexeme):
            tok = self.peek()
            found = "end of input" if tok is None else repr(tok.lexeme)
            raise self.error(f"expected {lexeme!r}, found {found}")
        self.i += 1
        return self.i - 1

    def eat(self, lexeme: str) -> bool:
        if self.at(lexeme):
            self.i += 1
            return True
        return False

    def consume_semicolon(self) -> None:
        if self.eat(";"):
            return
        if self.i >= self.n or self.at("}") or self.newline_before():
            return
        raise self.error(f"unexpected token {self.t[self.i].lexeme!r}")

    # -- program and statements -----------------------------------------

    def parse_program(self) -> Node:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 6000))
        try:
            body = []
            while self.i < self.n:
                body.append(self.statement_with_recovery())
            return Node("Program", 0, self.n - 1, body=body)
        finally:
            sys.setrecursionlimit(limit)

    def statement_with_recovery(self) -> Node:
        start = self.i
        try:
            return self.statement()
        except ParseError as exc:
            self.errors.append(exc)
        except RecursionError:
            self.errors.append(self.error("nesting too deep"))
        failed_at = self.i
        self.i = start
        self._resync(failed_at)
        if self.i == start:
            self.i += 1
        return Node("Error", start, self.i - 1)

    def _resync(self, failed_at: int) -> None:
        moved = False
        while self.i < self.n:
            tok = self.t[self.i]
            if self.i > failed_at and moved:
                if tok.lexeme == ";" and tok.kind != LITERAL:
                    self.i += 1
                    return
                if self.newline_before() or (tok.lexeme in CLOSERS and tok.kind != LITERAL):
                    return
            if tok.kind != LITERAL and tok.lexeme in OPENERS and self.i in self.pairs:
                self.i = self.pairs[self.i] + 1
            elif tok.kind != LITERAL and tok.lexeme in CLOSERS and self.i > failed_at:
                return
            else:
                self.i += 1
            moved = True

    def statement(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        lex, start = tok.lexeme, self.i
        if tok.kind == KEYWORD:
            handler = getattr(self, f"_stmt_{lex}", None)
            if lex == "let" and not self._let_is_declaration():
                handler = None
            if lex == "import" and (self.at("(", 1) or self.at(".", 1)):
                handler = None
            if handler is not None:
                return handler()
        elif tok.kind == IDENTIFIER:
            if lex == "async" and self.at("function", 1) and not self.newline_before(self.i + 1):
                return self.function(kind="declaration")
            if self.at(":", 1):
                self.i += 2
                body = self.statement()
                return Node("Labeled", start, body.end, label=start, body=body)
        elif lex == "{":
            return self.block()
        elif lex == ";":
            self.i += 1
            return Node("Empty", start, start)
        expr = self.expression()
        self.consume_semicolon()
        return Node("ExpressionStatement", start, self.i - 1, expression=expr)

    def _let_is_declaration(self) -> bool:
        nxt = self.peek(1)
        return nxt is not None and (nxt.kind in (IDENTIFIER, KEYWORD) or nxt.lexeme in ("[", "{"))

    def block(self) -> Node:
        start = self.expect("{")
        body = []
        while self.i < self.n and not self.at("}"):
            body.append(self.statement_with_recovery())
        self.expect("}")
        return Node("Block", start, self.i - 1, body=body)

    def _stmt_var(self) -> Node:
        node = self.var_declaration()
        self.consume_semicolon()
        node.end = self.i - 1
        return node

    _stmt_const = _stmt_var
    _stmt_let = _stmt_var

    def var_declaration(self, no_in: bool = False) -> Node:
        start = self.i
        kind = self.t[self.i].lexeme
        self.i += 1
        declarations = []
        while True:
            dstart = self.i
            target = self.binding_target()
            init = None
            if self.eat("="):
                init = self.assign(no_in)
            declarations.append(Node("Declarator", dstart, self.i - 1, target=target, init=init))
            if not self.eat(","):
                break
        return Node("VarDecl", start, self.i - 1, kind=kind, declarations=declarations)

    def binding_target(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise self.error("expected binding")
        if tok.lexeme == "[" and tok.kind != LITERAL:
            return self.array_literal()
        if tok.lexeme == "{" and tok.kind != LITERAL:
            return self.object_literal()
        if tok.kind in (IDENTIFIER, KEYWORD):
            self.i += 1
            return Node("Identifier", self.i - 1, self.i - 1, name=tok.lexeme)
        raise self.error(f"unexpected token {tok.lexeme!r} in binding")

    def _stmt_function(self) -> Node:
        return self.function(kind="declaration")

    def _stmt_class(self) -> Node:
        return self.class_(declaration=True)

    def _stmt_if(self) -> Node:
        start = self.i
        self.i += 1
        self.expect("(")
        test = self.expression()
        self.expect(")")
        consequent = self.statement()
        alternate = None
        else_token = None
        if self.at("else"):
            else_token = self.i
            self.i += 1
            alternate = self.statement()
        return Node(
            "If", start, self.i - 1,
            test=test, consequent=consequent, alternate=alternate, else_token=else_token,
        )

    def _stmt_for(self) -> Node:
        start = self.i
        self.i += 1
        if self.at_ident(name="await"):
            self.i += 1
        self.expect("(")
        init = None
        if not self.at(";"):
            if self.at("var") or self.at("const") or (self.at("let") and self._let_is_declaration()):
                init = self.var_declaration(no_in=True)
            else:
                init = self.expression(no_in=True)
        if self.at_ident(name="of") or self.at("in"):
            kind = "ForOf" if self.at_ident(name="of") else "ForIn"
            self.i += 1
            right = self.assign() if kind == "ForOf" else self.expression()
            self.expect(")")
            body = self.statement()
            return Node(kind, start, self.i - 1, left=init, right=right, body=body)
        self.expect(";")
        test = None if self.at(";") else self.expression()
        self.expect(";")
        update = None if self.at(")") else self.expression()
        self.expect(")")
        body = self.statement()
        return Node("For", start, self.i - 1, init=init, test=test, update=update, body=body)

    def _stmt_while(self) -> Node:
        start = self.i
        self.i += 1
        self.expect("(")
        test = self.expression()
        self.expect(")")
        body = self.statement()
        return Node("While", start, self.i - 1, test=test, body=body)

    def _stmt_do(self) -> Node:
        start = self.i
        self.i += 1
        body = self.statement()
        self.expect("while")
        self.expect("(")
        test = self.expression()
        self.expect(")")
        self.eat(";")
        return Node("DoWhile", start, self.i - 1, test=test, body=body)

    def _stmt_with(self) -> Node:
        start = self.i
        self.i += 1
        self.expect("(")
        obj = self.expression()
        self.expect(")")
        body = self.statement()
        return Node("With", start, self.i - 1, object=obj, body=body)

    def _stmt_switch(self) -> Node:
        start = self.i
        self.i += 1
        self.expect("(")
        disc = self.expression()
        self.expect(")")
        self.expect("{")
        cases = []
        while not self.at("}"):
            cstart = self.i
            if self.eat("default"):
                test = None
            else:
                self.expect("case")
                test = self.expression()
            self.expect(":")
            body = []
            while self.i < self.n and not (self.at("case") or self.at("default") or self.at("}")):
                body.append(self.statement_with_recovery())
            cases.append(Node("SwitchCase", cstart, self.i - 1, test=test, consequent=body))
        self.expect("}")
        return Node("Switch", start, self.i - 1, discriminant=disc, cases=cases)

    def _stmt_try(self) -> Node:
        start = self.i
        self.i += 1
        block = self.block()
        handler = finalizer = None
        if self.at("catch"):
            cstart = self.i
            self.i += 1
            param = None
            if self.eat("("):
                param = self.binding_target()
                self.expect(")")
            body = self.block()
            handler = Node("Catch", cstart, self.i - 1, param=param, body=body)
        if self.eat("finally"):
            finalizer = self.block()
        if handler is None and finalizer is None:
            raise self.error("try without catch or finally")
        return Node("Try", start, self.i - 1, block=block, handler=handler, finalizer=finalizer)

    def _stmt_return(self) -> Node:
        start = self.i
        self.i += 1
        argument = None
        if not (self.i >= self.n or self.at(";") or self.at("}") or self.newline_before()):
            argument = self.expression()
        self.consume_semicolon()
        return Node("Return", start, self.i - 1, argument=argument)

    def _stmt_throw(self) -> Node:
        start = self.i
        self.i += 1
        argument = self.expression()
        self.consume_semicolon()
        return Node("Throw", start, self.i - 1, argument=argument)

    def _jump(self, type_: str) -> Node:
        start = self.i
        self.i += 1
        if self.at_ident() and not self.newline_before():
            self.i += 1
        self.consume_semicolon()
        return Node(type_, start, self.i - 1)

    def _stmt_break(self) -> Node:
        return self._jump("Break")

    def _stmt_continue(self) -> Node:
        return self._jump("Continue")

    def _stmt_debugger(self) -> Node:
        start = self.i
        self.i += 1
        self.consume_semicolon()
        return Node("Debugger", start, self.i - 1)

    def _skip_module_clause(self) -> None:
        """Skip an import/export clause up to and including its module string."""
        while self.i < self.n:
            tok = self.t[self.i]
            if tok.kind == LITERAL and tok.lexeme[:1] in "'\"":
                self.i += 1
                return
            if tok.lexeme == ";" or (self.newline_before() and tok.kind == KEYWORD):
                return
            if tok.lexeme in OPENERS and self.i in self.pairs:
                self.i = self.pairs[self.i] + 1
            else:
                self.i += 1

    def _stmt_import(self) -> Node:
        start = self.i
        self.i += 1
        self._skip_module_clause()
        self.consume_semicolon()
        return Node("Import", start, self.i - 1)

    def _stmt_export(self) -> Node:
        start = self.i
        self.i += 1
        if self.eat("default"):
            if self.at("function") or (self.at_ident(name="async") and self.at("function", 1)):
                decl = self.function(kind="declaration", default_name="default")
            elif self.at("class"):
                decl = self.class_(declaration=True, default_name="default")
            else:
                expr = self.assign()
                self.consume_semicolon()
                decl = Node("ExportDefault", start, self.i - 1, expression=expr)
            return Node("Export", start, self.i - 1, declaration=decl)
        if self.at("{") or self.at("*"):
            if self.at("{"):
                self.i = self.pairs.get(self.i, self.i) + 1
            else:
                self.i += 1
            if self.at_ident(name="as"):
                self.i += 2
            if self.at_ident(name="from"):
                self.i += 1
                self._skip_module_clause()
            self.consume_semicolon()
            return Node("Export", start, self.i - 1, declaration=None)
        decl = self.statement()
        return Node("Export", start, self.i - 1, declaration=decl)

    # -- functions and classes ------------------------------------------

    def function(self, kind: str, default_name: str | None = None) -> Node:
        """Parse ``[async] function [*] [name] (params) { body }``."""
        start = self.i
        is_async = False
        if self.at_ident(name="async"):
            is_async = True
            self.i += 1
        self.expect("function")
        is_generator = self.eat("*")
        name_tok = None
        tok = self.peek()
        if tok is not None and (tok.kind == IDENTIFIER or tok.lexeme in ("yield", "let")):
            name_tok = self.i
            self.i += 1
        if name_tok is None and kind == "declaration" and default_name is None:
            raise self.error("function declaration requires a name")
        params = self.params()
        body = self.block()
        return Node(
            "Function", start, self.i - 1,
            kind=kind, name_tok=name_tok, default_name=default_name, params=params,
            body=body, is_async=is_async, is_generator=is_generator, expression_body=False,
        )

    def params(self) -> list[Node]:
        self.expect("(")
        params = []
        while not self.at(")"):
            if self.at("..."):
                pstart = self.i
                self.i += 1
                arg = self.assign()
                params.append(Node("Rest", pstart, self.i - 1, argument=arg))
            else:
                params.append(self.assign())
            if not self.eat(","):
                break
        self.expect(")")
        return params

    def method(self, start: int, key: Node, kind: str, is_async: bool, is_generator: bool) -> Node:
        params = self.params()
        body = self.block()
        return Node(
            "Function", start, self.i - 1,
            kind=kind, name_tok=None, key=key, params=params, body=body,
            is_async=is_async, is_generator=is_generator, expression_body=False,
        )

    def property_key(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise self.error("expected property name")
        start = self.i
        if tok.lexeme == "[" and tok.kind != LITERAL:
            self.i += 1
            expr = self.assign()
            self.expect("]")
            return Node("ComputedKey", start, self.i - 1, expression=expr)
        if tok.kind in (IDENTIFIER, KEYWORD, LITERAL):
            self.i += 1
            return Node("Key", start, start, name=_key_name(tok))
        raise self.error(f"unexpected token {tok.lexeme!r} as property name")

    def _is_key_start(self, k: int) -> bool:
        tok = self.peek(k)
        if tok is None:
            return False
        if tok.kind in (IDENTIFIER, KEYWORD) or (tok.kind == LITERAL and tok.lexeme[:1] not in "`/"):
            return True
        return tok.lexeme == "[" or tok.lexeme == "*"

    def _modifiers(self) -> tuple[bool, bool, str | None]:
        """Consume ``async``, ``*``, ``get``/``set`` prefixes of a method."""
        is_async = is_generator = False
        accessor = None
        if self.at_ident(name="async") and self._is_key_start(1) and not self.newline_before(self.i + 1):
            is_async = True
            self.i += 1
        if self.eat("*"):
            is_generator = True
        if (
            not is_async and not is_generator
            and (self.at_ident(name="get") or self.at_ident(name="set"))
            and self._is_key_start(1) and not self.at("*", 1)
        ):
            accessor = "getter" if self.t[self.i].lexeme == "get" else "setter"
            self.i += 1
        return is_async, is_generator, accessor

    def class_(self, declaration: bool, default_name: str | None = None) -> Node:
        start = self.expect("class")
        name_tok = None
        if self.at_ident():
            name_tok = self.i
            self.i += 1
        elif declaration and default_name is None:
            raise self.error("class declaration requires a name")
        superclass = None
        if self.eat("extends"):
            superclass = self.lhs()
        self.expect("{")
        members = []
        while self.i < self.n and not self.at("}"):
            if self.eat(";"):
                continue
            mstart = self.i
            is_static = False
            if self.at_ident(name="static") and not (self.at("(", 1) or self.at("=", 1)):
                is_static = True
                self.i += 1
            is_async, is_generator, accessor = self._modifiers()
            key = self.property_key()
            if self.at("("):
                kind = accessor or (
                    "constructor" if key.get("name") == "constructor" else "method"
                )
                members.append(self.method(mstart, key, kind, is_async, is_generator))
            else:
                value = None
                if self.eat("="):
                    value = self.assign()
                self.consume_semicolon()
                members.append(Node("Field", mstart, self.i - 1, key=key, value=value, static=is_static))
        self.expect("}")
        return Node(
            "Class", start, self.i - 1,
            name_tok=name_tok, default_name=default_name, superclass=superclass,
            members=members, declaration=declaration,
        )

    # -- expressions -----------------------------------------------------

    def expression(self, no_in: bool = False) -> Node:
        start = self.i
        expr = self.assign(no_in)
        if not self.at(","):
            return expr
        items = [expr]
        while self.eat(","):
            items.append(self.assign(no_in))
        return Node("Sequence", start, self.i - 1, expressions=items)

    def _arrow_ahead(self) -> int | None:
        """Index of the ``=>`` token if an arrow function starts here."""
        tok = self.peek()
        if tok is None:
            return None
        j = self.i
        if tok.kind == IDENTIFIER and tok.lexeme == "async" and not self.newline_before(j + 1):
            nxt = self.peek(1)
            if nxt is not None and (nxt.kind == IDENTIFIER or nxt.lexeme == "("):
                j += 1
                tok = nxt
        if tok.kind == IDENTIFIER or (tok.kind == KEYWORD and tok.lexeme in ("yield", "let")):
            arrow = j + 1
        elif tok.lexeme == "(" and tok.kind != LITERAL and j in self.pairs:
            arrow = self.pairs[j] + 1
        else:
            return None
        if arrow < self.n and self.t[arrow].lexeme == "=>" and not self.newline_before(arrow):
            return arrow
        return None

    def arrow(self, arrow_at: int, no_in: bool) -> Node:
        start = self.i
        is_async = False
        if self.at_ident(name="async") and self.i + 1 < arrow_at:
            is_async = True
            self.i += 1
        if self.at("("):
            params = self.params()
        else:
            params = [Node("Identifier", self.i, self.i, name=self.t[self.i].lexeme)]
            self.i += 1
        self.expect("=>")
        if self.at("{"):
            body = self.block()
            expression_body = False
        else:
            body = self.assign(no_in)
            expression_body = True
        return Node(
            "Function", start, self.i - 1,
            kind="arrow", name_tok=None, params=params, body=body,
            is_async=is_async, is_generator=False, expression_body=expression_body,
        )

    def assign(self, no_in: bool = False) -> Node:
        arrow_at = self._arrow_ahead()
        if arrow_at is not None:
            return self.arrow(arrow_at, no_in)
        start = self.i
        if self.at("yield"):
            self.i += 1
            self.eat("*")
            argument = None
            tok = self.peek()
            if (
                tok is not None and not self.newline_before()
                and not (tok.kind != LITERAL and tok.lexeme in (")", "]", "}", ",", ";", ":"))
            ):
                argument = self.assign(no_in)
            return Node("Yield", start, self.i - 1, argument=argument)
        left = self.conditional(no_in)
        tok = self.peek()
        if tok is not None and tok.kind != LITERAL and tok.lexeme in ASSIGNMENT:
            op_at = self.i
            self.i += 1
            right = self.assign(no_in)
            return Node("Assign", start, self.i - 1, op=tok.lexeme, op_at=op_at, target=left, value=right)
        return left

    def conditional(self, no_in: bool) -> Node:
        start = self.i
        test = self.binary(0, no_in)
        if not self.at("?"):
            return test
        q = self.i
        self.i += 1
        consequent = self.assign()
        self.expect(":")
        alternate = self.assign(no_in)
        return Node(
            "Conditional", start, self.i - 1,
            test=test, consequent=consequent, alternate=alternate, question=q,
        )

    def binary(self, min_prec: int, no_in: bool) -> Node:
        start = self.i
        left = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind == LITERAL or tok.kind == IDENTIFIER:
                break
            op = tok.lexeme
            prec = BINARY_PRECEDENCE.get(op)
            if prec is None or prec <= min_prec:
                break
            if op == "in" and no_in:
                break
            op_at = self.i
            self.i += 1
            right = self.binary(prec - 1 if op == "**" else prec, no_in)
            left = Node(
                "Logical" if op in LOGICAL else "Binary", start, self.i - 1,
                op=op, op_at=op_at, left=left, right=right,
            )
        return left

    def _starts_expression(self, k: int) -> bool:
        tok = self.peek(k)
        if tok is None:
            return False
        if tok.kind in (IDENTIFIER, LITERAL):
            return True
        if tok.kind == KEYWORD:
            return tok.lexeme in _EXPR_START_KEYWORDS
        return tok.lexeme in ("(", "[", "{", "!", "~", "+", "-", "++", "--")

    def unary(self) -> Node:
        tok = self.peek()
        start = self.i
        if tok is None:
            raise self.error("unexpected end of input")
        if tok.kind != LITERAL and tok.lexeme in UNARY:
            self.i += 1
            argument = self.unary()
            return Node("Unary", start, self.i - 1, op=tok.lexeme, argument=argument)
        if tok.kind != LITERAL and tok.lexeme in ("++", "--"):
            self.i += 1
            argument = self.unary()
            return Node("Update", start, self.i - 1, op=tok.lexeme, argument=argument, prefix=True)
        if (
            tok.kind == IDENTIFIER and tok.lexeme == "await"
            and not self.newline_before(self.i + 1) and self._starts_expression(1)
            and not self.at("(", 1)
        ):
            self.i += 1
            argument = self.unary()
            return Node("Await", start, self.i - 1, argument=argument)
        expr = self.lhs()
        nxt = self.peek()
        if (
            nxt is not None and nxt.kind != LITERAL and nxt.lexeme in ("++", "--")
            and not self.newline_before()
        ):
            self.i += 1
            return Node("Update", start, self.i - 1, op=nxt.lexeme, argument=expr, prefix=False)
        return expr

    def arguments(self) -> list[Node]:
        self.expect("(")
        args = []
        while not self.at(")"):
            if self.at("..."):
                s = self.i
                self.i += 1
                arg = self.assign()
                args.append(Node("Spread", s, self.i - 1, argument=arg))
            else:
                args.append(self.assign())
            if not self.eat(","):
                break
        self.expect(")")
        return args

    def _member_name(self) -> Node:
        tok = self.peek()
        if tok is None or tok.kind not in (IDENTIFIER, KEYWORD, LITERAL) or (
            tok.kind == LITERAL and tok.lexeme not in ("null", "true", "false")
        ):
            raise self.error("expected property name after '.'")
        self.i += 1
        return Node("Identifier", self.i - 1, self.i - 1, name=tok.lexeme)

    def lhs(self, allow_call: bool = True) -> Node:
        start = self.i
        if self.at("new"):
            expr = self.new()
        else:
            expr = self.primary()
        while self.i < self.n:
            tok = self.t[self.i]
            lex = tok.lexeme
            if tok.kind == LITERAL:
                if lex.startswith("`"):
                    quasi = self.primary()
                    expr = Node("TaggedTemplate", start, self.i - 1, tag=expr, quasi=quasi)
                    continue
                break
            if lex == ".":
                self.i += 1
                prop = self._member_name()
                expr = Node("Member", start, self.i - 1, object=expr, property=prop, computed=False)
            elif lex == "?.":
                self.i += 1
                if self.at("(") and allow_call:
                    args = self.arguments()
                    expr = Node("Call", start, self.i - 1, callee=expr, arguments=args, optional=True)
                elif self.at("["):
                    self.i += 1
                    prop = self.expression()
                    self.expect("]")
                    expr = Node("Member", start, self.i - 1, object=expr, property=prop, computed=True)
                else:
                    prop = self._member_name()
                    expr = Node("Member", start, self.i - 1, object=expr, property=prop, computed=False)
            elif lex == "[":
                self.i += 1
                prop = self.expression()
                self.expect("]")
                expr = Node("Member", start, self.i - 1, object=expr, property=prop, computed=True)
            elif lex == "(" and allow_call:
                args = self.arguments()
                expr = Node("Call", start, self.i - 1, callee=expr, arguments=args, optional=False)
            else:
                break
        return expr

    def new(self) -> Node:
        start = self.expect("new")
        if self.eat("."):
            prop = self._member_name()
            return Node("MetaProperty", start, self.i - 1, property=prop)
        callee = self.new() if self.at("new") else self.lhs(allow_call=False)
        args = self.arguments() if self.at("(") else []
        return Node("New", start, self.i - 1, callee=callee, arguments=args)

    def primary(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        start, lex = self.i, tok.lexeme
        if tok.kind == IDENTIFIER:
            if lex == "async" and self.at("function", 1) and not self.newline_before(self.i + 1):
                return self.function(kind="expression")
            self.i += 1
            return Node("Identifier", start, start, name=lex)
        if tok.kind == LITERAL:
            if lex.startswith("`"):
                return self.template()
            self.i += 1
            return Node("Literal", start, start, value=lex)
        if tok.kind == KEYWORD:
            if lex == "function":
                return self.function(kind="expression")
            if lex == "class":
                return self.class_(declaration=False)
            if lex in ("this", "super"):
                self.i += 1
                return Node("This" if lex == "this" else "Super", start, start)
            if lex == "import":
                self.i += 1
                return Node("ImportExpr", start, start)
            if lex in ("let", "yield"):
                self.i += 1
                return Node("Identifier", start, start, name=lex)
            raise self.error(f"unexpected keyword {lex!r}")
        if lex == "(":
            self.i += 1
            expr = self.expression()
            self.expect(")")
            return Node("Paren", start, self.i - 1, expression=expr)
        if lex == "[":
            return self.array_literal()
        if lex == "{":
            return self.object_literal()
        if lex == "<":
            raise self.error("JSX syntax is not supported")
        raise self.error(f"unexpected token {lex!r}")

    def template(self) -> Node:
        start = self.i
        head = self.t[self.i].lexeme
        self.i += 1
        expressions = []
        if head.endswith("${") and not (head.endswith("\\${")):
            while True:
                expressions.append(self.expression())
                tok = self.peek()
                if tok is None or tok.kind != LITERAL or not tok.lexeme.startswith("}"):
                    raise self.error("unterminated template substitution")
                self.i += 1
                if not tok.lexeme.endswith("${"):
                    break
        return Node("Template", start, self.i - 1, expressions=expressions)

    def array_literal(self) -> Node:
        start = self.expect("[")
        elements = []
        while not self.at("]"):
            if self.at(","):
                self.i += 1
                elements.append(None)
                continue
            if self.at("..."):
                s = self.i
                self.i += 1
                arg = self.assign()
                elements.append(Node("Spread", s, self.i - 1, argument=arg))
            else:
                elements.append(self.assign())
            if not self.eat(","):
                break
        self.expect("]")
        return Node("Array", start, self.i - 1, elements=[e for e in elements if e is not None])

    def object_literal(self) -> Node:
        start = self.expect("{")
        props = []
        while not self.at("}"):
            pstart = self.i
            if self.at("..."):
                self.i += 1
                arg = self.assign()
                props.append(Node("Spread", pstart, self.i - 1, argument=arg))
            else:
                is_async, is_generator, accessor = self._modifiers()
                key = self.property_key()
                if self.at("("):
                    kind = accessor or "method"
                    props.append(self.method(pstart, key, kind, is_async, is_generator))
                elif is_async or is_generator or accessor:
                    raise self.error("expected '(' after method name")
                elif self.eat(":"):
                    value = self.assign()
                    props.append(Node("Property", pstart, self.i - 1, key=key, value=value))
                elif self.eat("="):
                    value = self.assign()
                    props.append(Node("Property", pstart, self.i - 1, key=key, value=value, shorthand=True))
                else:
                    props.append(Node("Property", pstart, self.i - 1, key=key, value=None, shorthand=True))
            if not self.eat(","):
                break
        self.expect("}")
        return Node("Object", start, self.i - 1, properties=props)


def _key_name(tok: Token) -> str:
    lex = tok.lexeme
    if tok.kind == LITERAL and lex[:1] in "'\"" and len(lex) >= 2:
        return lex[1:-1]
    return lex


def parse(tokens: list[Token]) -> tuple[Node, list[Token], list[ParseError]]:
    """Parse ``tokens``; returns the program node, code tokens and errors."""
    parser = Parser(tokens)
    program = parser.parse_program()
    return program, parser.t, parser.errors
