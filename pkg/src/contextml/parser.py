"""
Lexer, recursive descent parser and pretty-printer for ``.cml`` sources.

Concrete syntax::

    expr   := "fun" IDENT "(" IDENT ":" type ")" [":" type] ["requires" layers] "=>" expr
            | "let" IDENT "=" expr "in" expr
            | "if" expr "then" expr "else" expr
            | "with" "(" expr ")" "in" expr
            | binop
    binop  := app (OP app)*          -- * / bind tighter than + -, which bind tighter than = < >
    app    := atom atom*
    atom   := NUM | LAYER | IDENT | "(" expr ")" | "{" LAYER "." expr ("," LAYER "." expr)* "}"
    type   := tyatom [("->" | "-[" layers "]->") type]
    tyatom := "int" | "ly" layers | "(" type ")"
    layers := "{" [LAYER ("," LAYER)*] "}"

Comments run from ``--`` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import diagnostics as diag
from .diagnostics import Diagnostic, ParseError
from .syntax import App, BinOp, Fun, If, Layer, Let, LExp, Num, Span, Var, With
from .types import INT, Arrow, Int, Ly

KEYWORDS = frozenset(
    ["fun", "let", "in", "if", "then", "else", "with", "requires", "int", "ly"]
)

# Longest alternatives first so that "-[" wins over "-" and "=>" over "=".
SYMBOLS = ["]->", "-[", "->", "=>", "(", ")", "{", "}", ",", ".", ":",
           "=", "+", "-", "*", "/", "<", ">"]

PRECEDENCE = {"=": 1, "<": 1, ">": 1, "+": 2, "-": 2, "*": 3, "/": 3}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>--[^\n]*)|(?P<number>[0-9]+)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<symbol>"
    + "|".join(re.escape(s) for s in SYMBOLS)
    + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | number | lower-ident | upper-ident | symbol | eof
    text: str
    span: Span


def tokenize(text: str) -> list:
    """Split ``text`` into tokens; raises ParseError on a stray character."""
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            span = Span(line, col, line, col + 1)
            raise ParseError(
                [Diagnostic(diag.PARSE_BADCHAR, f"unrecognized character {text[pos]!r}", span)]
            )
        kind, lexeme = m.lastgroup, m.group()
        span = Span(line, col, line, col + len(lexeme))
        if kind == "ident":
            if lexeme in KEYWORDS:
                kind = "keyword"
            elif lexeme[0].isupper():
                kind = "upper-ident"
            else:
                kind = "lower-ident"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, lexeme, span))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "", Span(line, col, line, col)))
    return tokens


@dataclass(frozen=True)
class Binding:
    """A top-level ``let x = e`` without a body, as typed at the REPL."""

    name: str
    expr: object
    span: Span = None


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text, kind=None) -> bool:
        tok = self.tok
        if kind is not None and tok.kind != kind:
            return False
        return tok.text == text and tok.kind in ("keyword", "symbol")

    def error(self, expected):
        tok = self.tok
        if tok.kind == "eof":
            raise ParseError(
                [Diagnostic(diag.PARSE_EOF, f"unexpected end of input, expected {expected}",
                            tok.span, expected=expected, found="end of input")]
            )
        raise ParseError(
            [Diagnostic(diag.PARSE_UNEXPECTED, f"unexpected {tok.text!r}, expected {expected}",
                        tok.span, expected=expected, found=tok.text)]
        )

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(repr(text))
        return self.advance()

    def expect_kind(self, kind, what) -> Token:
        if self.tok.kind != kind:
            self.error(what)
        return self.advance()

    # expressions

    def expr(self):
        tok = self.tok
        if tok.kind == "keyword":
            if tok.text == "fun":
                return self.fun()
            if tok.text == "let":
                self.advance()
                name = self.expect_kind("lower-ident", "a variable name").text
                self.expect("=")
                bound = self.expr()
                self.expect("in")
                body = self.expr()
                return Let(name, bound, body, tok.span.to(body.span))
            if tok.text == "if":
                self.advance()
                cond = self.expr()
                self.expect("then")
                then = self.expr()
                self.expect("else")
                orelse = self.expr()
                return If(cond, then, orelse, tok.span.to(orelse.span))
            if tok.text == "with":
                self.advance()
                self.expect("(")
                layer = self.expr()
                self.expect(")")
                self.expect("in")
                body = self.expr()
                return With(layer, body, tok.span.to(body.span))
        return self.binop(1)

    def fun(self):
        start = self.advance()
        f = self.expect_kind("lower-ident", "a function name").text
        self.expect("(")
        x = self.expect_kind("lower-ident", "a parameter name").text
        self.expect(":")
        param_ty = self.type()
        self.expect(")")
        ret_ty = None
        if self.at(":"):
            self.advance()
            ret_ty = self.type()
        precond = frozenset()
        if self.at("requires"):
            self.advance()
            precond = self.layerset()
        self.expect("=>")
        body = self.expr()
        return Fun(f, x, param_ty, ret_ty, precond, body, start.span.to(body.span))

    def binop(self, min_prec):
        left = self.app()
        while self.tok.kind == "symbol" and PRECEDENCE.get(self.tok.text, 0) >= min_prec:
            op = self.advance().text
            right = self.binop(PRECEDENCE[op] + 1)
            left = BinOp(op, left, right, left.span.to(right.span))
        return left

    def starts_atom(self) -> bool:
        tok = self.tok
        return tok.kind in ("number", "upper-ident", "lower-ident") or (
            tok.kind == "symbol" and tok.text in ("(", "{")
        )

    def app(self):
        fn = self.atom()
        while self.starts_atom():
            arg = self.atom()
            fn = App(fn, arg, fn.span.to(arg.span))
        return fn

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Num(int(tok.text), tok.span)
        if tok.kind == "upper-ident":
            self.advance()
            return Layer(tok.text, tok.span)
        if tok.kind == "lower-ident":
            self.advance()
            return Var(tok.text, tok.span)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("{"):
            self.advance()
            branches = [self.branch()]
            while self.at(","):
                self.advance()
                branches.append(self.branch())
            end = self.expect("}")
            return LExp(tuple(branches), tok.span.to(end.span))
        self.error("an expression")

    def branch(self):
        name = self.expect_kind("upper-ident", "a layer name").text
        self.expect(".")
        return (name, self.expr())

    # types

    def type(self):
        dom = self.type_atom()
        if self.at("->"):
            self.advance()
            return Arrow(dom, frozenset(), self.type())
        if self.at("-["):
            self.advance()
            pre = self.layerset()
            self.expect("]->")
            return Arrow(dom, pre, self.type())
        return dom

    def type_atom(self):
        if self.at("int"):
            self.advance()
            return INT
        if self.at("ly"):
            self.advance()
            return Ly(self.layerset())
        if self.at("("):
            self.advance()
            t = self.type()
            self.expect(")")
            return t
        self.error("a type")

    def layerset(self) -> frozenset:
        self.expect("{")
        names = []
        if not self.at("}"):
            names.append(self.expect_kind("upper-ident", "a layer name").text)
            while self.at(","):
                self.advance()
                names.append(self.expect_kind("upper-ident", "a layer name").text)
        self.expect("}")
        return frozenset(names)

    def finish(self, result):
        if self.tok.kind != "eof":
            self.error("end of input")
        return result


def parse(text: str):
    """Parse a whole program; raises ParseError with a single diagnostic."""
    p = _Parser(text)
    return p.finish(p.expr())


def parse_type(text: str):
    p = _Parser(text)
    return p.finish(p.type())


def parse_layer_list(text: str) -> tuple:
    """Parse ``A,B,C`` (as given to ``--context``) into a stack, top first."""
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    for name in names:
        if not re.fullmatch(r"[A-Z][A-Za-z0-9_]*", name):
            raise ParseError([Diagnostic(diag.PARSE_BADNAME, f"{name!r} is not a layer name")])
    return names


def parse_toplevel(text: str):
    """Parse a REPL line: either an expression or a ``let x = e`` binding."""
    p = _Parser(text)
    toks = p.tokens
    if (
        len(toks) > 3
        and toks[0].kind == "keyword" and toks[0].text == "let"
        and toks[1].kind == "lower-ident"
        and toks[2].text == "=" and toks[2].kind == "symbol"
    ):
        start = p.advance()
        name = p.advance().text
        p.advance()
        bound = p.expr()
        if p.tok.kind == "eof":
            return Binding(name, bound, start.span.to(bound.span))
        p.expect("in")
        body = p.expr()
        return p.finish(Let(name, bound, body, start.span.to(body.span)))
    return p.finish(p.expr())


# pretty printing

def pretty_type(t) -> str:
    return str(t)


def pretty(e) -> str:
    """Render an expression so that ``parse(pretty(e)) == e``."""
    return _pretty(e, 0)


def _paren(text, needed):
    return f"({text})" if needed else text


def _pretty(e, prec):
    # prec: 0 expression, 1-3 operator operand, 4 application head, 5 atom
    if isinstance(e, Num):
        return str(e.n)
    if isinstance(e, (Layer, Var)):
        return e.name
    if isinstance(e, LExp):
        inner = ", ".join(f"{name}. {_pretty(body, 0)}" for name, body in e.branches)
        return "{" + inner + "}"
    if isinstance(e, Fun):
        head = f"fun {e.f} ({e.x}: {pretty_type(e.param_ty)})"
        if e.ret_ty is not None:
            head += f": {pretty_type(e.ret_ty)}"
        if e.precond:
            head += " requires {" + ", ".join(sorted(e.precond)) + "}"
        return _paren(f"{head} => {_pretty(e.body, 0)}", prec > 0)
    if isinstance(e, Let):
        text = f"let {e.x} = {_pretty(e.bound, 0)} in {_pretty(e.body, 0)}"
        return _paren(text, prec > 0)
    if isinstance(e, If):
        text = f"if {_pretty(e.cond, 0)} then {_pretty(e.then, 0)} else {_pretty(e.orelse, 0)}"
        return _paren(text, prec > 0)
    if isinstance(e, With):
        return _paren(f"with ({_pretty(e.layer, 0)}) in {_pretty(e.body, 0)}", prec > 0)
    if isinstance(e, BinOp):
        p = PRECEDENCE[e.op]
        text = f"{_pretty(e.left, p)} {e.op} {_pretty(e.right, p + 1)}"
        return _paren(text, prec > p)
    if isinstance(e, App):
        return _paren(f"{_pretty(e.fn, 4)} {_pretty(e.arg, 5)}", prec > 4)
    raise TypeError(f"not an expression: {e!r}")
