"""Halstead measures over a token sequence.

Classification table: identifiers and literals are operands; keywords and
operators are operators, and so are the punctuators listed in
``COUNTED_PUNCTUATION``. Closing brackets are not counted because their
opener already represents the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ..inventory.lexer import COMMENT, IDENTIFIER, KEYWORD, LITERAL, OPERATOR, PUNCTUATION, Token

COUNTED_PUNCTUATION = frozenset(["(", "[", "{", ";", ",", ":"])


@dataclass(frozen=True)
class Halstead:
    HOR_D: int = 0
    HOR_T: int = 0
    HON_D: int = 0
    HON_T: int = 0
    HLEN: int = 0
    HVOC: int = 0
    HDIFF: float = 0.0
    HVOL: float = 0.0
    HEFF: float = 0.0
    HBUGS: float = 0.0
    HTIME: float = 0.0


def classify(tok: Token) -> str | None:
    """Return ``"operator"``, ``"operand"`` or None for uncounted tokens."""
    if tok.kind in (IDENTIFIER, LITERAL):
        return "operand"
    if tok.kind in (KEYWORD, OPERATOR):
        return "operator"
    if tok.kind == PUNCTUATION and tok.lexeme in COUNTED_PUNCTUATION:
        return "operator"
    return None


def halstead(tokens: Iterable[Token]) -> Halstead:
    operators: dict[str, int] = {}
    operands: dict[str, int] = {}
    for tok in tokens:
        if tok.kind == COMMENT:
            continue
        role = classify(tok)
        if role == "operator":
            operators[tok.lexeme] = operators.get(tok.lexeme, 0) + 1
        elif role == "operand":
            operands[tok.lexeme] = operands.get(tok.lexeme, 0) + 1
    n1, n2 = len(operators), len(operands)
    N1, N2 = sum(operators.values()), sum(operands.values())
    length, vocab = N1 + N2, n1 + n2
    volume = length * math.log2(vocab) if vocab > 0 else 0.0
    difficulty = (n1 / 2.0) * (N2 / n2) if n2 > 0 else 0.0
    effort = difficulty * volume
    return Halstead(
        HOR_D=n1,
        HOR_T=N1,
        HON_D=n2,
        HON_T=N2,
        HLEN=length,
        HVOC=vocab,
        HDIFF=difficulty,
        HVOL=volume,
        HEFF=effort,
        HBUGS=volume / 3000.0,
        HTIME=effort / 18.0,
    )
