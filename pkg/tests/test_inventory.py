from __future__ import annotations

import json

import pytest

from jsvulnpred.errors import LexError, UnterminatedComment, UnterminatedString
from jsvulnpred.inventory import dump_functions, extract_functions, parse_source, span_overlaps, tokenize
from jsvulnpred.inventory.lexer import COMMENT, IDENTIFIER, KEYWORD, LITERAL, OPERATOR, PUNCTUATION


def names(src: str) -> list[str]:
    return [k.qualified_name for k in extract_functions(src, "t.js")]


def test_token_kinds():
    toks = tokenize("var x = 'a' + 1; // done")
    kinds = [(t.kind, t.lexeme) for t in toks]
    assert kinds == [
        (KEYWORD, "var"),
        (IDENTIFIER, "x"),
        (OPERATOR, "="),
        (LITERAL, "'a'"),
        (OPERATOR, "+"),
        (LITERAL, "1"),
        (PUNCTUATION, ";"),
        (COMMENT, "// done"),
    ]


def test_regex_versus_division():
    div = [t.lexeme for t in tokenize("a = b / c / d;")]
    assert div.count("/") == 2
    rx = [t for t in tokenize("a = /x+/g.test(s);") if t.kind == LITERAL]
    assert rx[0].lexeme == "/x+/g"


def test_template_literal_with_nested_braces():
    toks = tokenize("`a${ {k: 1}.k }b`")
    assert toks[0].kind == LITERAL and toks[-1].kind == LITERAL
    assert any(t.lexeme == "k" and t.kind == IDENTIFIER for t in toks)


def test_multiline_token_positions():
    toks = tokenize("/* a\nb */ x")
    assert (toks[0].line, toks[0].end_line) == (1, 2)
    assert (toks[1].line, toks[1].col) == (2, 5)


@pytest.mark.parametrize(
    "src, exc", [('"abc', UnterminatedString), ("/* x", UnterminatedComment), ("a # b", LexError)]
)
def test_lex_errors_are_collected(src, exc):
    stream = tokenize(src)
    assert stream.partial
    assert isinstance(stream.errors[0], exc)


def test_function_forms_and_names():
    src = """
function decl(a) {}
var expr = function () {};
let arrow = (a, b) => a + b;
const obj = { m() {}, p: function () {}, q: () => 1, 'lit': function () {} };
class K { constructor() {} static s() {} get g() { return 1; } }
function* gen() {}
async function af() {}
x.y.z = function () {};
"""
    assert names(src) == [
        "decl", "expr", "arrow", "obj.m", "obj.p", "obj.q", "obj.lit",
        "K.constructor", "K.s", "K.g", "gen", "af", "z",
    ]


def test_nested_and_anonymous_names():
    src = "function outer() {\n  return [1].map(function (v) { return v; });\n}\n"
    keys = extract_functions(src, "n.js")
    assert keys[0].qualified_name == "outer"
    assert keys[1].qualified_name.startswith("outer.<anon@2:")


def test_spans_are_inclusive_lines():
    src = "\n\nfunction f() {\n  return 1;\n}\n"
    (k,) = extract_functions(src, "s.js")
    assert (k.span.start_line, k.span.end_line) == (3, 5)
    assert k.span.line_count == 3
    assert span_overlaps(k, [5]) and not span_overlaps(k, [2, 6])


def test_recovery_keeps_later_functions():
    sf = parse_source("function broken( { return 1; }\nfunction fine() { return 2; }\n", "r.js")
    assert sf.recovered and sf.errors
    assert [k.qualified_name for k in sf.keys()] == ["fine"]


def test_lexer_resumes_after_unterminated_string():
    sf = parse_source('var s = "open\nfunction f() {}', "e.js")
    assert sf.recovered
    assert [k.qualified_name for k in sf.keys()] == ["f"]


def test_shebang_line_is_skipped():
    assert names("#!/usr/bin/env node\nfunction main() {}\n") == ["main"]


def test_dump_functions_is_json():
    sf = parse_source("function a() {}\nfunction b() {}\n", "d.js")
    rows = json.loads(dump_functions([sf]))
    assert [r["name"] for r in rows] == ["a", "b"]


def test_duplicate_names_stay_distinct_by_span():
    keys = extract_functions("function a() {}\nfunction a() {}\n", "dup.js")
    assert len(keys) == 2 and keys[0] != keys[1]
