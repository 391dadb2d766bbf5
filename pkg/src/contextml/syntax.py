"""
Abstract syntax of ContextML, layer contexts and substitution.

Expressions are immutable dataclasses.  Every node carries an optional
source span; spans never take part in equality or hashing, so two trees
that differ only in where they came from compare equal.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional, Union

LAYER_NAME = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
IDENT = re.compile(r"[a-z][A-Za-z0-9_]*\Z")

BINOPS = ("+", "-", "*", "/", "=", "<", ">")


def is_layer_name(text: str) -> bool:
    return bool(LAYER_NAME.match(text))


def is_ident(text: str) -> bool:
    return bool(IDENT.match(text))


@dataclass(frozen=True)
class Span:
    """Source range; lines and columns are 1-based, end column exclusive."""

    line: int
    col: int
    end_line: int
    end_col: int

    def to(self, other: Optional["Span"]) -> "Span":
        if other is None:
            return self
        return Span(self.line, self.col, other.end_line, other.end_col)


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    n: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Layer:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Fun:
    """Recursive function ``fun f (x: param_ty) [: ret_ty] requires precond => body``.

    The annotations only matter to the type checker.
    """

    f: str
    x: str
    param_ty: object
    ret_ty: object
    precond: frozenset
    body: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App:
    fn: "Expr"
    arg: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Let:
    x: str
    bound: "Expr"
    body: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class With:
    layer: "Expr"
    body: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class LExp:
    """Layered expression; ``branches`` is a non-empty tuple of (layer, expr)."""

    branches: tuple
    span: Optional[Span] = _span()

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a layered expression needs at least one branch")

    @property
    def layers(self) -> tuple:
        return tuple(name for name, _ in self.branches)


Expr = Union[Num, Layer, Var, Fun, App, Let, BinOp, If, With, LExp]


def is_value(e) -> bool:
    # Closedness of Fun values follows from evaluating closed programs only.
    return isinstance(e, (Num, Layer, Fun))


# Contexts are tuples of layer names with the top of the stack at index 0.

def push(context: tuple, layer: str) -> tuple:
    return (layer,) + tuple(context)


def pop(context: tuple) -> tuple:
    if not context:
        raise IndexError("pop from an empty context")
    return tuple(context[1:])


def layers_of(context) -> frozenset:
    """The set of active layers ``|C|`` of a context."""
    return frozenset(context)


def children(e) -> tuple:
    if isinstance(e, Fun):
        return (e.body,)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, Let):
        return (e.bound, e.body)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, If):
        return (e.cond, e.then, e.orelse)
    if isinstance(e, With):
        return (e.layer, e.body)
    if isinstance(e, LExp):
        return tuple(body for _, body in e.branches)
    return ()


def depth(e) -> int:
    """Height of the tree; leaves have depth 1."""
    kids = children(e)
    if not kids:
        return 1
    return 1 + max(depth(k) for k in kids)


def size(e) -> int:
    return 1 + sum(size(k) for k in children(e))


def free_vars(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (Num, Layer)):
        return frozenset()
    if isinstance(e, Fun):
        return free_vars(e.body) - {e.f, e.x}
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.x})
    out = frozenset()
    for k in children(e):
        out |= free_vars(k)
    return out


def substitute(e, x: str, v):
    """Replace the free occurrences of ``x`` in ``e`` by the closed value ``v``.

    Capture cannot happen because ``v`` has no free variables.  Subtrees
    that do not mention ``x`` are returned as-is, so sharing is preserved.
    """
    if isinstance(e, Var):
        return v if e.name == x else e
    if isinstance(e, (Num, Layer)):
        return e
    if isinstance(e, Fun):
        if x in (e.f, e.x):
            return e
        body = substitute(e.body, x, v)
        return e if body is e.body else replace(e, body=body)
    if isinstance(e, Let):
        bound = substitute(e.bound, x, v)
        body = e.body if e.x == x else substitute(e.body, x, v)
        if bound is e.bound and body is e.body:
            return e
        return replace(e, bound=bound, body=body)
    if isinstance(e, App):
        fn, arg = substitute(e.fn, x, v), substitute(e.arg, x, v)
        if fn is e.fn and arg is e.arg:
            return e
        return replace(e, fn=fn, arg=arg)
    if isinstance(e, BinOp):
        left, right = substitute(e.left, x, v), substitute(e.right, x, v)
        if left is e.left and right is e.right:
            return e
        return replace(e, left=left, right=right)
    if isinstance(e, If):
        parts = (substitute(e.cond, x, v), substitute(e.then, x, v), substitute(e.orelse, x, v))
        if all(a is b for a, b in zip(parts, (e.cond, e.then, e.orelse))):
            return e
        return replace(e, cond=parts[0], then=parts[1], orelse=parts[2])
    if isinstance(e, With):
        layer, body = substitute(e.layer, x, v), substitute(e.body, x, v)
        if layer is e.layer and body is e.body:
            return e
        return replace(e, layer=layer, body=body)
    if isinstance(e, LExp):
        branches = tuple((name, substitute(body, x, v)) for name, body in e.branches)
        if all(a[1] is b[1] for a, b in zip(branches, e.branches)):
            return e
        return replace(e, branches=branches)
    raise TypeError(f"not an expression: {e!r}")


def with_children(e, kids):
    """Rebuild ``e`` with its immediate subexpressions replaced, in ``children`` order."""
    kids = tuple(kids)
    if isinstance(e, Fun):
        return replace(e, body=kids[0])
    if isinstance(e, App):
        return replace(e, fn=kids[0], arg=kids[1])
    if isinstance(e, Let):
        return replace(e, bound=kids[0], body=kids[1])
    if isinstance(e, BinOp):
        return replace(e, left=kids[0], right=kids[1])
    if isinstance(e, If):
        return replace(e, cond=kids[0], then=kids[1], orelse=kids[2])
    if isinstance(e, With):
        return replace(e, layer=kids[0], body=kids[1])
    if isinstance(e, LExp):
        return replace(e, branches=tuple((name, k) for (name, _), k in zip(e.branches, kids)))
    if kids:
        raise ValueError("leaf expressions have no children")
    return e
