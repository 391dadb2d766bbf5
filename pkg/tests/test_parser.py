import pytest
from hypothesis import given
from hypothesis import strategies as st

from contextml.diagnostics import ParseError
from contextml.parser import Binding, parse, parse_layer_list, parse_toplevel, parse_type, pretty, tokenize
from contextml.syntax import App, BinOp, Fun, If, Layer, Let, LExp, Num, Var, With
from contextml.types import INT, Arrow, Ly, ly


def kinds(text):
    return [(t.kind, t.text) for t in tokenize(text)[:-1]]


def test_tokenize_with():
    assert kinds("with (A) in 5") == [
        ("keyword", "with"), ("symbol", "("), ("upper-ident", "A"),
        ("symbol", ")"), ("keyword", "in"), ("number", "5"),
    ]


def test_tokenize_longest_match():
    assert kinds("letx") == [("lower-ident", "letx")]
    assert kinds("=> = -[ ]-> -> -") == [("symbol", s) for s in ["=>", "=", "-[", "]->", "->", "-"]]


def test_tokenize_bad_character():
    with pytest.raises(ParseError) as err:
        tokenize("€")
    d = err.value.diagnostics[0]
    assert d.code == "PARSE001"
    assert (d.span.line, d.span.col) == (1, 1)


def test_tokenize_skips_comments_and_tracks_lines():
    toks = tokenize("1 -- one\n  2")
    assert [(t.text, t.span.line, t.span.col) for t in toks[:-1]] == [("1", 1, 1), ("2", 2, 3)]


@given(st.text(alphabet="ab Ax(){}.,:=<>+-*/_0123456789\n€$", max_size=30))
def test_token_spans_cover_the_input_in_order(text):
    try:
        toks = tokenize(text)
    except ParseError as err:
        d = err.diagnostics[0]
        lines = text.split("\n")
        assert 1 <= d.span.line <= len(lines)
        assert 1 <= d.span.col <= len(lines[d.span.line - 1])
        return
    lines = text.split("\n")
    prev = (1, 1)
    for t in toks[:-1]:
        assert (t.span.line, t.span.col) >= prev
        assert lines[t.span.line - 1][t.span.col - 1:t.span.end_col - 1] == t.text
        prev = (t.span.end_line, t.span.end_col)


def test_parse_examples():
    assert parse("with (A) in 5") == With(Layer("A"), Num(5))
    assert parse("{A. 1, B. 2}") == LExp((("A", Num(1)), ("B", Num(2))))
    assert parse("fun f (x: int) requires {L1} => {L1. 0}") == Fun(
        "f", "x", INT, None, frozenset({"L1"}), LExp((("L1", Num(0)),))
    )


def test_precedence_and_associativity():
    assert parse("1 + 2 * 3") == BinOp("+", Num(1), BinOp("*", Num(2), Num(3)))
    assert parse("1 - 2 - 3") == BinOp("-", BinOp("-", Num(1), Num(2)), Num(3))
    assert parse("1 < 2 + 3") == BinOp("<", Num(1), BinOp("+", Num(2), Num(3)))
    assert parse("f a b") == App(App(Var("f"), Var("a")), Var("b"))
    assert parse("f a + g b") == BinOp("+", App(Var("f"), Var("a")), App(Var("g"), Var("b")))


def test_bodies_extend_right():
    assert parse("let x = 1 in x + 1") == Let("x", Num(1), BinOp("+", Var("x"), Num(1)))
    assert parse("if 1 then 2 else 3 + 4") == If(Num(1), Num(2), BinOp("+", Num(3), Num(4)))


def test_types():
    assert parse_type("int -> int") == Arrow(INT, frozenset(), INT)
    assert parse_type("int -[{A, B}]-> ly{A}") == Arrow(INT, frozenset("AB"), ly("A"))
    assert parse_type("int -> int -> int") == Arrow(INT, frozenset(), Arrow(INT, frozenset(), INT))
    assert parse_type("(int -> int) -> int") == Arrow(Arrow(INT, frozenset(), INT), frozenset(), INT)
    assert parse_type("ly {}") == Ly(frozenset())


def test_fun_with_return_type():
    e = parse("fun f (x: ly{A}): int -[{B}]-> int requires {} => fun g (y: int) requires {B} => y")
    assert e.ret_ty == Arrow(INT, frozenset({"B"}), INT)
    assert e.precond == frozenset()


@pytest.mark.parametrize("text, code", [
    ("", "PARSE003"),
    ("let x = 1", "PARSE003"),
    ("1 +", "PARSE003"),
    ("{}", "PARSE002"),
    ("with A in 1", "PARSE002"),
    ("fun (x: int) => x", "PARSE002"),
    ("1 2 )", "PARSE002"),
    ("{a. 1}", "PARSE002"),
])
def test_parse_errors(text, code):
    with pytest.raises(ParseError) as err:
        parse(text)
    (d,) = err.value.diagnostics
    assert d.code == code


def test_error_position():
    with pytest.raises(ParseError) as err:
        parse("let x = 1 in\n  x + )")
    d = err.value.diagnostics[0]
    assert (d.span.line, d.span.col) == (2, 7)
    assert d.found == ")"


def test_pretty_examples():
    assert pretty(With(Layer("A"), Num(5))) == "with (A) in 5"
    assert pretty(LExp((("A", Num(1)),))) == "{A. 1}"
    assert pretty(App(App(Var("f"), Var("a")), Var("b"))) == "f a b"


def test_pretty_parenthesizes_when_needed():
    e = BinOp("-", Num(1), BinOp("-", Num(2), Num(3)))
    assert pretty(e) == "1 - (2 - 3)"
    e = App(Var("f"), With(Layer("A"), Num(1)))
    assert pretty(e) == "f (with (A) in 1)"
    assert parse(pretty(e)) == e


def test_round_trip_corpus(small_corpus):
    for sample in small_corpus:
        assert parse(pretty(sample.expr)) == sample.expr


def test_toplevel():
    b = parse_toplevel("let x = 3")
    assert isinstance(b, Binding) and b.name == "x" and b.expr == Num(3)
    assert parse_toplevel("let x = 3 in x") == Let("x", Num(3), Var("x"))
    assert parse_toplevel("x") == Var("x")


def test_layer_list():
    assert parse_layer_list("L1,L2") == ("L1", "L2")
    assert parse_layer_list("") == ()
    with pytest.raises(ParseError):
        parse_layer_list("a,B")
