"""JavaScript tokenizer.

Produces a flat token list with comments retained. Regular expression
literals are told apart from division by looking at the previous
significant token, and template literals are split into their string parts
so that code inside ``${...}`` is tokenized normally.

Lexical errors never abort: the offending construct is closed at the end of
its line, a diagnostic is recorded and the stream is flagged ``partial``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ..errors import LexError, UnterminatedComment, UnterminatedString

IDENTIFIER = "identifier"
LITERAL = "literal"
KEYWORD = "keyword"
OPERATOR = "operator"
PUNCTUATION = "punctuation"
COMMENT = "comment"

KEYWORDS = frozenset(
    """
    break case catch class const continue debugger default delete do else
    export extends finally for function if import in instanceof let new
    return super switch this throw try typeof var void while with yield
    """.split()
)
LITERAL_WORDS = frozenset(["null", "true", "false"])

PUNCTUATORS = frozenset("()[]{};,:")

# longest first
OPERATORS = sorted(
    """
    >>>= ... === !== **= <<= >>= >>> &&= ||= ??=
    => == != <= >= && || ?? ?. ++ -- += -= *= /= %= &= |= ^= ** << >>
    = + - * / % & | ^ ! ~ < > ? .
    """.split(),
    key=len,
    reverse=True,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    lexeme: str
    line: int  # 1-based
    col: int  # 0-based
    end_line: int
    end_col: int  # exclusive

    @property
    def is_comment(self) -> bool:
        return self.kind == COMMENT

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.lexeme!r}, {self.line}:{self.col})"


@dataclass
class TokenStream:
    tokens: list[Token] = field(default_factory=list)
    errors: list[LexError] = field(default_factory=list)

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, item):
        return self.tokens[item]

    def code(self) -> list[Token]:
        """Tokens without comments."""
        return [t for t in self.tokens if t.kind != COMMENT]


def _is_id_start(ch: str) -> bool:
    return ch.isalpha() or ch in "$_" or (ord(ch) > 127 and ch.isidentifier())


def _is_id_part(ch: str) -> bool:
    return ch.isalnum() or ch in "$_\u200c\u200d" or (ord(ch) > 127 and ("a" + ch).isidentifier())


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.n = len(source)
        self.pos = 0
        self.line = 1
        self.line_start = 0
        self.out = TokenStream()
        # each entry is either "{" or "`" (an open template substitution)
        self.braces: list[str] = []
        self.last_significant: Token | None = None

    # -- helpers ---------------------------------------------------------

    def _col(self, pos: int) -> int:
        return pos - self.line_start

    def _advance_to(self, end: int) -> None:
        """Move to ``end``; only LF counts as a line break, as in git diffs."""
        src = self.src
        i = src.find("\n", self.pos, end)
        while i != -1:
            self.line += 1
            self.line_start = i + 1
            i = src.find("\n", i + 1, end)
        self.pos = end

    def _emit(self, kind: str, start: int, end: int) -> Token:
        line, col = self.line, self._col(start)
        self._advance_to(end)
        tok = Token(kind, self.src[start:end], line, col, self.line, self._col(end))
        self.out.tokens.append(tok)
        if kind != COMMENT:
            self.last_significant = tok
        return tok

    def _line_end(self, start: int) -> int:
        i = start
        while i < self.n and self.src[i] not in "\n\r\u2028\u2029":
            i += 1
        return i

    def _error(self, exc: LexError) -> None:
        self.out.errors.append(exc)

    def _regex_allowed(self) -> bool:
        prev = self.last_significant
        if prev is None:
            return True
        if prev.kind in (IDENTIFIER, LITERAL):
            return False
        if prev.kind == KEYWORD:
            return prev.lexeme not in ("this", "super")
        return prev.lexeme not in (")", "]", "}", "++", "--")

    # -- scanners --------------------------------------------------------

    def run(self) -> TokenStream:
        src = self.src
        if src.startswith("#!"):
            self._emit(COMMENT, 0, self._line_end(0))
        while self.pos < self.n:
            ch = src[self.pos]
            if ch.isspace() or ch == "\ufeff":
                self._advance_to(self.pos + 1)
                continue
            start = self.pos
            nxt = src[start + 1] if start + 1 < self.n else ""
            if ch == "/" and nxt == "/":
                self._emit(COMMENT, start, self._line_end(start))
            elif ch == "/" and nxt == "*":
                end = src.find("*/", start + 2)
                if end == -1:
                    self._error(UnterminatedComment("unterminated block comment", self.line))
                    self._emit(COMMENT, start, self._line_end(start))
                else:
                    self._emit(COMMENT, start, end + 2)
            elif ch in "'\"":
                self._string(start, ch)
            elif ch == "`":
                self._template(start + 1, start)
            elif ch.isdigit() or (ch == "." and nxt.isdigit()):
                self._number(start)
            elif _is_id_start(ch) or ch == "\\":
                self._word(start)
            elif ch == "/" and self._regex_allowed():
                self._regex(start)
            elif ch in PUNCTUATORS:
                self._punct(start, ch)
            else:
                for op in OPERATORS:
                    if src.startswith(op, start):
                        if op == "?." and start + 2 < self.n and src[start + 2].isdigit():
                            continue
                        self._emit(OPERATOR, start, start + len(op))
                        break
                else:
                    # private names (#x) and stray characters
                    if ch == "#" and start + 1 < self.n and _is_id_start(src[start + 1]):
                        self._word(start + 1, token_start=start)
                    else:
                        self._error(LexError(f"unexpected character {ch!r}", self.line))
                        self._emit(PUNCTUATION, start, start + 1)
        return self.out

    def _punct(self, start: int, ch: str) -> None:
        if ch == "{":
            self.braces.append("{")
        elif ch == "}" and self.braces:
            if self.braces.pop() == "`":
                self._template(start + 1, start)
                return
        self._emit(PUNCTUATION, start, start + 1)

    def _string(self, start: int, quote: str) -> None:
        src, i = self.src, start + 1
        while i < self.n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == quote:
                self._emit(LITERAL, start, i + 1)
                return
            if c in "\n\r":
                break
            i += 1
        self._error(UnterminatedString("unterminated string literal", self.line))
        self._emit(LITERAL, start, min(i, self.n))

    def _template(self, i: int, start: int) -> None:
        """Scan a template chunk starting after '`' or after a closing '}'."""
        src = self.src
        while i < self.n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == "`":
                self._emit(LITERAL, start, i + 1)
                return
            if c == "$" and i + 1 < self.n and src[i + 1] == "{":
                self._emit(LITERAL, start, i + 2)
                self.braces.append("`")
                return
            i += 1
        self._error(UnterminatedString("unterminated template literal", self.line))
        self._emit(LITERAL, start, self._line_end(start))

    def _number(self, start: int) -> None:
        src, i = self.src, start
        if src[i] == "0" and i + 1 < self.n and src[i + 1] in "xXoObB":
            i += 2
            while i < self.n and (src[i].isalnum() or src[i] == "_"):
                i += 1
        else:
            while i < self.n and (src[i].isdigit() or src[i] == "_"):
                i += 1
            if i < self.n and src[i] == ".":
                i += 1
                while i < self.n and (src[i].isdigit() or src[i] == "_"):
                    i += 1
            if i < self.n and src[i] in "eE":
                j = i + 1
                if j < self.n and src[j] in "+-":
                    j += 1
                if j < self.n and src[j].isdigit():
                    i = j
                    while i < self.n and src[i].isdigit():
                        i += 1
            if i < self.n and src[i] == "n":
                i += 1
        self._emit(LITERAL, start, i)

    def _word(self, i: int, token_start: int | None = None) -> None:
        src, start = self.src, i if token_start is None else token_start
        while i < self.n:
            c = src[i]
            if c == "\\" and i + 1 < self.n and src[i + 1] == "u":
                if i + 2 < self.n and src[i + 2] == "{":
                    close = src.find("}", i)
                    i = close + 1 if close != -1 else self.n
                else:
                    i += 6
            elif _is_id_part(c):
                i += 1
            else:
                break
        word = src[start:i]
        if token_start is not None:
            kind = IDENTIFIER
        elif word in KEYWORDS:
            kind = KEYWORD
        elif word in LITERAL_WORDS:
            kind = LITERAL
        else:
            kind = IDENTIFIER
        self._emit(kind, start, i)

    def _regex(self, start: int) -> None:
        src, i, in_class = self.src, start + 1, False
        while i < self.n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c in "\n\r":
                break
            if c == "[":
                in_class = True
            elif c == "]":
                in_class = False
            elif c == "/" and not in_class:
                i += 1
                while i < self.n and _is_id_part(src[i]):
                    i += 1
                self._emit(LITERAL, start, i)
                return
            i += 1
        self._error(UnterminatedString("unterminated regular expression", self.line))
        self._emit(LITERAL, start, min(i, self.n))


def tokenize(source: str) -> TokenStream:
    """Split JavaScript ``source`` into tokens (comments included)."""
    return _Lexer(source).run()
