"""
Annotated types and the subtype lattice.

    int | ly{L1,...} | t1 -[{L1,...}]-> t2

A layer type ``ly{..}`` over-approximates the layers an expression may
produce; the set on an arrow lists the layers that must be active when
the function is applied.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Int:
    def __str__(self):
        return "int"


@dataclass(frozen=True)
class Ly:
    layers: frozenset

    def __str__(self):
        return "ly" + format_layerset(self.layers)


@dataclass(frozen=True)
class Arrow:
    dom: object
    pre: frozenset
    cod: object

    def __str__(self):
        dom = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        arrow = "->" if not self.pre else f"-[{format_layerset(self.pre)}]->"
        return f"{dom} {arrow} {self.cod}"


INT = Int()


def ly(*names) -> Ly:
    return Ly(frozenset(names))


def format_layerset(layers) -> str:
    return "{" + ", ".join(sorted(layers)) + "}"


class LatticeError(Exception):
    """No join or meet exists for the given pair."""

    def __init__(self, code, t1, t2):
        self.code = code
        self.t1 = t1
        self.t2 = t2
        super().__init__(f"{code}: {t1} and {t2} have no common bound")


def subtype(t1, t2) -> bool:
    if isinstance(t1, Int):
        return isinstance(t2, Int)
    if isinstance(t1, Ly):
        return isinstance(t2, Ly) and t1.layers <= t2.layers
    if isinstance(t1, Arrow):
        return (
            isinstance(t2, Arrow)
            and t1.pre <= t2.pre
            and subtype(t2.dom, t1.dom)
            and subtype(t1.cod, t2.cod)
        )
    raise TypeError(f"not a type: {t1!r}")


def join(t1, t2):
    """Least upper bound; raises LatticeError("TYPE_JOIN") if none exists."""
    if isinstance(t1, Int) and isinstance(t2, Int):
        return t1
    if isinstance(t1, Ly) and isinstance(t2, Ly):
        return t1 if t1.layers >= t2.layers else Ly(t1.layers | t2.layers)
    if isinstance(t1, Arrow) and isinstance(t2, Arrow):
        try:
            dom = meet(t1.dom, t2.dom)
        except LatticeError:
            raise LatticeError("TYPE_JOIN", t1, t2) from None
        return Arrow(dom, t1.pre | t2.pre, join(t1.cod, t2.cod))
    raise LatticeError("TYPE_JOIN", t1, t2)


def meet(t1, t2):
    """Greatest lower bound; raises LatticeError("TYPE_MEET") if none exists."""
    if isinstance(t1, Int) and isinstance(t2, Int):
        return t1
    if isinstance(t1, Ly) and isinstance(t2, Ly):
        return Ly(t1.layers & t2.layers)
    if isinstance(t1, Arrow) and isinstance(t2, Arrow):
        try:
            dom = join(t1.dom, t2.dom)
            cod = meet(t1.cod, t2.cod)
        except LatticeError:
            raise LatticeError("TYPE_MEET", t1, t2) from None
        return Arrow(dom, t1.pre & t2.pre, cod)
    raise LatticeError("TYPE_MEET", t1, t2)


def type_depth(t) -> int:
    """Base types have depth 1; each arrow adds one level."""
    if isinstance(t, Arrow):
        return 1 + max(type_depth(t.dom), type_depth(t.cod))
    return 1


def all_types(layer_universe, max_depth: int) -> list:
    """Every type of depth <= max_depth whose annotations draw on the universe."""
    names = sorted(layer_universe)
    subsets = [frozenset(c) for c in _powerset(names)]
    base = [INT] + [Ly(s) for s in subsets]
    if max_depth <= 1:
        return base
    smaller = all_types(layer_universe, max_depth - 1)
    arrows = [Arrow(d, p, c) for d in smaller for p in subsets for c in smaller]
    return base + arrows


def _powerset(names):
    out = [()]
    for name in names:
        out += [s + (name,) for s in out]
    return out


def layer_subsets(layer_universe) -> list:
    return [frozenset(c) for c in _powerset(sorted(layer_universe))]
