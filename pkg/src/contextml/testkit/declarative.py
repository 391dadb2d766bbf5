"""
Brute-force search over derivations of the declarative type system.

The declarative rules include unrestricted subsumption, so the set of
types an expression can be given is upward closed.  We compute that set
exactly, restricted to a finite universe of types, by trying every rule
instance whose premises are derivable.  Sets are bitmasks over the
universe.

The universe holds the base types, arrows from base types to base types,
and arrows from base types to those arrows.  That covers every type
occurring in the enumerated fragment produced by ``enumerate_terms``.

Two choices mirror the algorithmic checker and are part of the fragment:
a function that calls itself must declare its result type, and ``with``
over an expression of type ``ly{}`` is rejected.  Declared annotations
fix the parameter type, the precondition set (which plays the role of
the guessed context's layer set) and, when present, the result type.
"""
from __future__ import annotations

from itertools import product

from ..syntax import App, BinOp, Fun, If, Layer, Let, LExp, Num, Var, With, free_vars
from ..types import INT, Arrow, Int, Ly, layer_subsets


def rule_subtype(t1, t2) -> bool:
    """The three subtyping rules, transcribed directly."""
    if isinstance(t1, Int) and isinstance(t2, Int):
        return True
    if isinstance(t1, Ly) and isinstance(t2, Ly):
        return t1.layers <= t2.layers
    if isinstance(t1, Arrow) and isinstance(t2, Arrow):
        return rule_subtype(t2.dom, t1.dom) and rule_subtype(t1.cod, t2.cod) and t1.pre <= t2.pre
    return False


class OutsideUniverse(Exception):
    pass


class Universe:
    def __init__(self, layers):
        self.layers = frozenset(layers)
        subsets = layer_subsets(self.layers)
        base = [INT] + [Ly(s) for s in subsets]
        first = [Arrow(d, p, c) for d in base for p in subsets for c in base]
        second = [Arrow(d, p, c) for d in base for p in subsets for c in first]
        self.types = base + first + second
        self.index = {t: i for i, t in enumerate(self.types)}
        self.subsets = subsets
        self.up = self._up_sets()
        # (dom, pre) -> {index of result type: index of the arrow}
        self.arrow_table = {}
        for i, t in enumerate(self.types):
            if isinstance(t, Arrow):
                self.arrow_table.setdefault((t.dom, t.pre), {})[self.index[t.cod]] = i
        self.int_bit = self.bit(INT)

    def _up_sets(self):
        # built rule by rule instead of testing all pairs
        up = {}
        for t in self.types:
            if isinstance(t, Arrow):
                continue
            mask = 0
            for u in self.types:
                if not isinstance(u, Arrow) and rule_subtype(t, u):
                    mask |= 1 << self.index[u]
            up[t] = mask
        down_base = {t: [u for u in self.types if not isinstance(u, Arrow) and rule_subtype(u, t)]
                     for t in self.types if not isinstance(t, Arrow)}
        for t in self.types:
            if isinstance(t, Arrow) and not isinstance(t.cod, Arrow):
                up[t] = self._arrow_up(t, up, down_base)
        for t in self.types:
            if isinstance(t, Arrow) and isinstance(t.cod, Arrow):
                up[t] = self._arrow_up(t, up, down_base)
        return [up[t] for t in self.types]

    def _arrow_up(self, t, up, down_base):
        mask = 0
        cods = [self.types[i] for i in self.members(up[t.cod])]
        for d in down_base[t.dom]:
            for p in self.subsets:
                if not t.pre <= p:
                    continue
                for c in cods:
                    i = self.index.get(Arrow(d, p, c))
                    if i is not None:
                        mask |= 1 << i
        return mask

    def bit(self, t):
        i = self.index.get(t)
        if i is None:
            raise OutsideUniverse(str(t))
        return 1 << i

    def upset(self, t):
        i = self.index.get(t)
        if i is None:
            raise OutsideUniverse(str(t))
        return self.up[i]

    @staticmethod
    def members(mask):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low


class Derivations:
    """Derivable type sets ``T(env, active, e)`` for one universe."""

    def __init__(self, universe: Universe):
        self.u = universe
        self.memo = {}

    def types_of(self, e, env=(), active=frozenset()) -> frozenset:
        return frozenset(self.u.types[i] for i in self.u.members(self.derive(e, env, active)))

    def derive(self, e, env=(), active=frozenset()) -> int:
        key = (e, env, active)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._derive(e, env, frozenset(active))
        return hit

    def lookup(self, env, name):
        for x, t in reversed(env):
            if x == name:
                return t
        return None

    def _derive(self, e, env, active):
        u = self.u
        if isinstance(e, Num):
            return u.upset(INT)
        if isinstance(e, Layer):
            return u.upset(Ly(frozenset((e.name,))))
        if isinstance(e, Var):
            t = self.lookup(env, e.name)
            return 0 if t is None else u.upset(t)

        if isinstance(e, Fun):
            recursive = e.f != e.x and e.f in free_vars(e.body)
            if recursive and e.ret_ty is None:
                return 0
            table = u.arrow_table.get((e.param_ty, e.precond))
            if table is None:
                raise OutsideUniverse(f"{e.param_ty} -[{set(e.precond)}]-> ...")
            if recursive:
                arrow = Arrow(e.param_ty, e.precond, e.ret_ty)
                inner = env + ((e.f, arrow), (e.x, e.param_ty))
            else:
                inner = env + ((e.x, e.param_ty),)
            body = self.derive(e.body, inner, e.precond)
            if e.ret_ty is not None:
                return u.upset(Arrow(e.param_ty, e.precond, e.ret_ty)) if body & u.bit(e.ret_ty) else 0
            # no annotation: any derivable body type may serve as the result
            out = 0
            for i in u.members(body):
                j = table.get(i)
                if j is not None:
                    out |= u.up[j]
            return out

        if isinstance(e, App):
            fns = self.derive(e.fn, env, active)
            args = self.derive(e.arg, env, active)
            out = 0
            for i in u.members(fns):
                t = u.types[i]
                if isinstance(t, Arrow) and t.pre <= active and args & u.bit(t.dom):
                    out |= u.upset(t.cod)
            return out

        if isinstance(e, Let):
            out = 0
            for i in u.members(self.derive(e.bound, env, active)):
                out |= self.derive(e.body, env + ((e.x, u.types[i]),), active)
            return out

        if isinstance(e, BinOp):
            if self.derive(e.left, env, active) & self.derive(e.right, env, active) & u.int_bit:
                return u.upset(INT)
            return 0

        if isinstance(e, If):
            if not self.derive(e.cond, env, active) & u.int_bit:
                return 0
            return self.derive(e.then, env, active) & self.derive(e.orelse, env, active)

        if isinstance(e, With):
            out = 0
            for i in u.members(self.derive(e.layer, env, active)):
                t = u.types[i]
                if not isinstance(t, Ly) or not t.layers:
                    continue
                common = -1
                for name in sorted(t.layers):
                    common &= self.derive(e.body, env, active | {name})
                out |= common
            return out

        if isinstance(e, LExp):
            if not any(name in active for name in e.layers):
                return 0
            out = -1
            for _, body in e.branches:
                out &= self.derive(body, env, active)
            return out

        raise TypeError(f"not an expression: {e!r}")


# exhaustive enumeration of a small fragment

PARAM_TYPES = (INT, Ly(frozenset({"A"})), Ly(frozenset({"A", "B"})))
PRECONDITIONS = (frozenset(), frozenset({"A"}), frozenset({"A", "B"}))
RETURN_TYPES = (None, INT)


def enumerate_terms(max_depth, layers=("A", "B"), scope=()):
    """Every term of height <= max_depth in the fragment, closed under ``scope``.

    Leaves are ``0``, the layer literals and the variables in scope.  Let
    binds ``x``; functions are named ``f`` with parameter ``y`` and carry
    annotations drawn from the small tables above.  An ``if`` condition is
    always a leaf, which keeps the fragment tractable at height three.
    """
    cache = {}

    def terms(d, scope):
        key = (d, scope)
        if key in cache:
            return cache[key]
        leaves = [Num(0)] + [Layer(L) for L in layers] + [Var(v) for v in scope]
        if d <= 1:
            cache[key] = leaves
            return leaves
        sub = terms(d - 1, scope)
        out = list(leaves)
        out += [App(a, b) for a, b in product(sub, sub)]
        out += [BinOp("+", a, b) for a, b in product(sub, sub)]
        out += [If(c, a, b) for c in leaves for a, b in product(sub, sub)]
        out += [With(a, b) for a, b in product(sub, sub)]
        for L in layers:
            out += [LExp(((L, a),)) for a in sub]
        for L1, L2 in product(layers, layers):
            if L1 != L2:
                out += [LExp(((L1, a), (L2, b))) for a, b in product(sub, sub)]
        inner = tuple(sorted(set(scope) | {"x"}))
        out += [Let("x", a, b) for a in sub for b in terms(d - 1, inner)]
        fscope = tuple(sorted(set(scope) | {"f", "y"}))
        for param, pre, ret in product(PARAM_TYPES, PRECONDITIONS, RETURN_TYPES):
            out += [Fun("f", "y", param, ret, pre, body) for body in terms(d - 1, fscope)]
        cache[key] = out
        return out

    return terms(max_depth, tuple(scope))


def check_agreement(max_depth=3, layers=("A", "B"), limit=5):
    """Compare ``synth`` with derivation search on every enumerated term and context.

    Agreement means the derivable set is empty exactly when ``synth``
    rejects, and otherwise equals the up-set of the synthesized type, so
    that type is derivable and below every derivable type.  Returns
    ``(stats, mismatches)``.
    """
    from ..checker import try_synth

    universe = Universe(layers)
    derivations = Derivations(universe)
    stats = {"terms": 0, "pairs": 0, "accepted": 0, "mismatches": 0}
    mismatches = []
    terms = enumerate_terms(max_depth, layers)
    stats["terms"] = len(terms)
    for active in universe.subsets:
        for e in terms:
            stats["pairs"] += 1
            t, _ = try_synth({}, active, e)
            derived = derivations.derive(e, (), active)
            if t is None:
                ok = derived == 0
            else:
                stats["accepted"] += 1
                ok = derived == universe.upset(t)
            if not ok:
                stats["mismatches"] += 1
                if len(mismatches) < limit:
                    mismatches.append((e, active, t, derivations.types_of(e, (), active)))
    return stats, mismatches
