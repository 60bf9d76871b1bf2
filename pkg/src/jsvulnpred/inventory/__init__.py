"""Parse JavaScript source and inventory its functions."""

from .functions import (
    FunctionInfo,
    FunctionKey,
    SourceFile,
    SourceSpan,
    dump_functions,
    extract_functions,
    parse_source,
    span_overlaps,
)
from .lexer import Token, TokenStream, tokenize

__all__ = [
    "FunctionInfo",
    "FunctionKey",
    "SourceFile",
    "SourceSpan",
    "Token",
    "TokenStream",
    "dump_functions",
    "extract_functions",
    "parse_source",
    "span_overlaps",
    "tokenize",
]
