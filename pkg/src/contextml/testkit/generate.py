"""
Random well-typed terms, built by running the typing rules backwards.

``gen(t, ...)`` returns an expression whose synthesized type is a subtype
of ``t``.  Instead of a single static layer set the generator tracks a
list of alternatives: inside ``with (e) in body`` the body must be
well-typed for every layer ``e`` might yield, so each alternative is
extended once per candidate layer.  A layered expression is only built
when its branches hit every alternative.

Side conditions that the checker also enforces (function preconditions,
dispatch coverage) are decided by the checker's own predicates, so a
bug planted there leaks into the generated corpus and shows up as a
stuck program.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .. import checker
from ..syntax import App, BinOp, Fun, If, Layer, Let, LExp, Num, Var, With
from ..types import INT, Arrow, Int, Ly, subtype

INF = float("inf")

DEFAULT_UNIVERSE = frozenset({"A", "B", "C"})


@dataclass
class GenParams:
    seed: int = 0
    max_depth: int = 5
    layer_universe: frozenset = field(default_factory=lambda: DEFAULT_UNIVERSE)
    target: object = None

    def __post_init__(self):
        self.layer_universe = frozenset(self.layer_universe)
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not self.layer_universe:
            raise ValueError("layer_universe must not be empty")


def inhabit_depth(t):
    """Depth of the smallest closed value of type ``t``."""
    if isinstance(t, Int):
        return 1
    if isinstance(t, Ly):
        return 1 if t.layers else INF
    return 1 + inhabit_depth(t.cod)


class _Rec:
    """A pending recursive call ``f (x / 2)``; usable once, so recursion stays linear."""

    def __init__(self, f, x, cod, pre):
        self.f, self.x, self.cod, self.pre = f, x, cod, pre
        self.used = False


class Generator:
    def __init__(self, params: GenParams, rng=None):
        self.params = params
        self.rng = rng if rng is not None else random.Random(params.seed)
        self.universe = sorted(params.layer_universe)
        self.names = 0

    def fresh(self, prefix):
        self.names += 1
        return f"{prefix}{self.names}"

    def subset(self, layers, nonempty=False):
        layers = sorted(layers)
        while True:
            chosen = frozenset(L for L in layers if self.rng.random() < 0.5)
            if chosen or not nonempty or not layers:
                return chosen

    def random_type(self, budget):
        """A type that has a value of depth at most ``budget``."""
        r = self.rng.random()
        if budget >= 2 and r < 0.15:
            dom = self.random_type(1) if self.rng.random() < 0.85 else self.random_type(2)
            return Arrow(dom, self.subset(self.universe), self.random_type(budget - 1))
        if r < 0.55:
            return INT
        return Ly(self.subset(self.universe, nonempty=True))

    def random_context(self):
        n = self.rng.randint(0, 3)
        return tuple(self.rng.choice(self.universe) for _ in range(n))

    # generation proper

    def gen(self, t, env, alts, budget, rec=None):
        assert inhabit_depth(t) <= budget, (t, budget)
        if budget >= 2 and self.rng.random() < 0.75:
            builders = self.compound_options(t, env, alts, budget, rec)
            if builders:
                weights = [w for w, _ in builders]
                _, build = self.rng.choices(builders, weights=weights)[0]
                return build()
        return self.leaf(t, env, alts, budget, rec)

    def leaf(self, t, env, alts, budget, rec):
        options = [Var(name) for name, vt in sorted(env.items()) if subtype(vt, t)]
        if isinstance(t, Int):
            options.append(Num(self.rng.randint(0, 5)))
        elif isinstance(t, Ly):
            options.extend(Layer(L) for L in sorted(t.layers))
        else:
            options.append(None)  # a function literal
        if rec is not None and self.rec_usable(rec, t, alts, budget):
            options.append("rec")
        pick = self.rng.choice(options)
        if pick is None:
            return self.fun(t, env, budget)
        if pick == "rec":
            rec.used = True
            return App(Var(rec.f), BinOp("/", Var(rec.x), Num(2)))
        return pick

    def rec_usable(self, rec, t, alts, budget):
        common = frozenset.intersection(*alts)
        return (
            not rec.used
            and budget >= 3
            and subtype(rec.cod, t)
            and checker.precondition_satisfied(rec.pre, common)
        )

    def compound_options(self, t, env, alts, budget, rec):
        sub = budget - 1
        fits = inhabit_depth(t) <= sub
        out = []
        if isinstance(t, Int):
            out.append((1, lambda: self.binop(env, alts, sub, rec)))
        if isinstance(t, Arrow):
            out.append((2, lambda: self.fun(t, env, budget)))
        if fits:
            out.append((1, lambda: If(self.gen(INT, env, alts, sub, rec),
                                      self.gen(t, env, alts, sub, rec),
                                      self.gen(t, env, alts, sub, rec))))
            out.append((1, lambda: self.let(t, env, alts, sub, rec)))
            out.append((2, lambda: self.with_(t, env, alts, sub, rec)))
            if all(alts):
                out.append((2, lambda: self.lexp(t, env, alts, sub, rec)))
        if 1 + inhabit_depth(t) <= sub:
            out.append((2, lambda: self.app(t, env, alts, sub, rec)))
        return out

    def binop(self, env, alts, budget, rec):
        op = self.rng.choice(["+", "-", "*", "/", "=", "<", ">"])
        left = self.gen(INT, env, alts, budget, rec)
        if op == "/":
            # the type system does not rule out division by zero
            return BinOp(op, left, Num(self.rng.randint(1, 3)))
        return BinOp(op, left, self.gen(INT, env, alts, budget, rec))

    def let(self, t, env, alts, budget, rec):
        bound_t = self.random_type(budget)
        bound = self.gen(bound_t, env, alts, budget, rec)
        name = self.fresh("x")
        inner = dict(env)
        inner[name] = bound_t
        return Let(name, bound, self.gen(t, inner, alts, budget, rec))

    def with_(self, t, env, alts, budget, rec):
        phi = self.subset(self.universe, nonempty=True)
        layer = self.gen(Ly(phi), env, alts, budget, rec)
        pushed = sorted({a | {L} for a in alts for L in phi}, key=sorted)
        return With(layer, self.gen(t, env, pushed, budget, rec))

    def lexp(self, t, env, alts, budget, rec):
        chosen = []
        for a in alts:
            if not checker.dispatch_possible(chosen, a):
                chosen.append(self.rng.choice(sorted(a)))
        for _ in range(self.rng.randint(0, 2)):
            chosen.append(self.rng.choice(self.universe))
        self.rng.shuffle(chosen)
        branches = tuple((L, self.gen(t, env, alts, budget, rec)) for L in chosen)
        return LExp(branches)

    def app(self, t, env, alts, budget, rec):
        common = frozenset.intersection(*alts)
        pre = self.subset(self.universe)
        if not checker.precondition_satisfied(pre, common):
            pre = self.subset(common)
        dom = self.random_type(budget)
        fn = self.gen(Arrow(dom, pre, t), env, alts, budget, rec)
        return App(fn, self.gen(dom, env, alts, budget, rec))

    def fun(self, t, env, budget):
        pre = self.subset(t.pre)
        f, x = self.fresh("f"), self.fresh("y")
        declare = self.rng.random() < 0.5
        # f stays out of the pool of ordinary variables: it may only appear
        # as the guarded call set up below, which keeps every program terminating
        inner = dict(env)
        inner[x] = t.dom
        sub = budget - 1
        recursive = (
            declare
            and isinstance(t.dom, Int)
            and inhabit_depth(t.cod) <= sub - 1
            and sub - 1 >= 3
            and self.rng.random() < 0.3
        )
        if recursive:
            rec = _Rec(f, x, t.cod, pre)
            then = self.gen(t.cod, inner, [pre], sub - 1, rec)
            body = If(Var(x), then, self.gen(t.cod, inner, [pre], sub - 1))
        else:
            body = self.gen(t.cod, inner, [pre], sub)
        return Fun(f, x, t.dom, t.cod if declare else None, pre, body)


def gen_well_typed(params: GenParams, env, active, t, rng=None):
    """A random expression ``e`` with ``synth(env, active, e) <= t``."""
    g = Generator(params, rng)
    budget = max(params.max_depth, inhabit_depth(t))
    return g.gen(t, dict(env), [frozenset(active)], budget)


@dataclass(frozen=True)
class Sample:
    index: int
    context: tuple
    expr: object
    target: object


def term_rng(seed, index):
    return random.Random(f"{seed}:{index}")


def generate_sample(params: GenParams, index: int) -> Sample:
    """The ``index``-th corpus entry; independent of every other entry."""
    g = Generator(params, term_rng(params.seed, index))
    context = g.random_context()
    t = params.target if params.target is not None else g.random_type(max(params.max_depth, 1))
    budget = max(params.max_depth, inhabit_depth(t))
    e = g.gen(t, {}, [frozenset(context)], budget)
    return Sample(index, context, e, t)


def generate_corpus(params: GenParams, count: int):
    for i in range(count):
        yield generate_sample(params, i)
