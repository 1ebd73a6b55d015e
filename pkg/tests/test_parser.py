from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeanomaly.parser import (IllegalCharacter, LexError, ParseError, SyntaxNode, TokenKind, UnknownNodeKind,
                                UnterminatedString, parse, parse_source, supported_subset, to_source, tokenize)
from codeanomaly.synthetic import TEMPLATES


def kinds(tokens):
    return [(t.kind, t.text) for t in tokens]


def test_empty_source_has_no_tokens():
    assert tokenize("") == []


def test_tokens_of_empty_function():
    K, I, P = TokenKind.KEYWORD, TokenKind.IDENTIFIER, TokenKind.PUNCTUATION
    assert kinds(tokenize("fun f() {}")) == [(K, "fun"), (I, "f"), (P, "("), (P, ")"), (P, "{"), (P, "}")]


def test_string_template_tokens():
    toks = kinds(tokenize('val s = "a${x}b"'))
    assert (TokenKind.PUNCTUATION, "${") in toks
    assert (TokenKind.IDENTIFIER, "x") in toks
    assert [t for k, t in toks if k is TokenKind.LITERAL_STRING] == ["a", "b"]


def test_lex_errors_carry_position():
    with pytest.raises(UnterminatedString) as err:
        tokenize('fun f() = "open')
    assert (err.value.line, err.value.column) == (1, 11)
    with pytest.raises(IllegalCharacter) as err:
        tokenize("val x = 1\nval y = #")
    assert (err.value.line, err.value.column) == (2, 9)


def test_parse_empty_function():
    tree = parse(tokenize("fun f() {}"))
    assert tree.structure() == ("FILE", None, (
        ("FUNCTION", None, (("IDENTIFIER", "f", ()), ("PARAMETER_LIST", None, ()), ("BLOCK", None, ()))),))


def test_parse_empty_file():
    tree = parse(tokenize(""))
    assert tree.kind == "FILE" and tree.children == []


def test_when_with_two_branches():
    fn = parse_source("fun g(x: Int) = when(x) { 1 -> 1 else -> 0 }").children[0]
    assert fn.kind == "FUNCTION"
    when = fn.child("WHEN_EXPR")
    assert [c.kind for c in when.children if c.kind == "WHEN_ENTRY"] == ["WHEN_ENTRY", "WHEN_ENTRY"]


def test_parse_error_reports_expected_tokens():
    with pytest.raises(ParseError) as err:
        parse_source("fun f( {")
    assert (err.value.line, err.value.column) == (1, 8)
    assert "<identifier>" in err.value.expected


def test_grammar_self_description():
    g = supported_subset()
    assert g.has_rule("whenExpr")
    assert not g.accepts("typealias Name = String")
    assert g.accepts("suspend fun f() {}")
    assert "typealias" in g.excluded


def test_fixture_round_trip(fixtures):
    files = sorted((fixtures / "corpus").glob("*.kt"))
    assert files
    for path in files:
        tree = parse_source(path.read_text())
        again = parse_source(to_source(tree))
        assert again.structure() == tree.structure(), path.name


def test_outside_subset_fails_cleanly(fixtures):
    for path in sorted((fixtures / "outside").glob("*.kt")):
        with pytest.raises((ParseError, LexError)):
            parse_source(path.read_text())


def test_deeply_nested_input_does_not_crash():
    src = "fun f(x: Int): Int = " + "(" * 3000 + "x" + ")" * 3000
    try:
        tree = parse_source(src)
    except ParseError:
        return
    assert tree.children[0].kind == "FUNCTION"


def test_dict_round_trip_and_closed_catalog():
    tree = parse_source("fun h(a: Int): Int { return a + 1 }")
    assert SyntaxNode.from_dict(tree.to_dict()).structure() == tree.structure()
    with pytest.raises(UnknownNodeKind):
        SyntaxNode.from_dict({"kind": "TYPEALIAS", "children": []})


@given(st.integers(0, 10_000), st.integers(0, len(TEMPLATES) - 1))
def test_template_sources_round_trip_with_increasing_positions(seed, which):
    src = TEMPLATES[which](random.Random(seed))
    toks = tokenize(src)
    positions = [(t.line, t.column) for t in toks]
    assert positions == sorted(positions) and len(set(positions)) == len(positions)
    tree = parse_source(src)
    assert parse_source(to_source(tree)).structure() == tree.structure()
