"""Exhaustive checks of the subtype order, joins and meets over a finite set of types."""
from __future__ import annotations

from collections import Counter

from ..types import LatticeError, all_types, join, meet, subtype


def check_lattice(layer_universe=("A", "B", "C"), max_depth=2, limit=5):
    """Count violations of the order and bound laws; returns ``(counts, examples)``.

    Up- and down-sets are computed once with ``subtype``; the laws are then
    checked against them, so every quantifier ranges over the whole set.
    """
    types = all_types(layer_universe, max_depth)
    n = len(types)
    up = [set() for _ in range(n)]
    down = [set() for _ in range(n)]
    for i, a in enumerate(types):
        for j, b in enumerate(types):
            if subtype(a, b):
                up[i].add(j)
                down[j].add(i)
    index = {t: i for i, t in enumerate(types)}
    bad = Counter()
    examples = []

    def fail(law, *ts):
        bad[law] += 1
        if len(examples) < limit:
            examples.append((law, tuple(str(t) for t in ts)))

    for i in range(n):
        if i not in up[i]:
            fail("reflexivity", types[i])
        for j in up[i]:
            if j != i and i in up[j]:
                fail("antisymmetry", types[i], types[j])
            for k in up[j]:
                if k not in up[i]:
                    fail("transitivity", types[i], types[j], types[k])

    for i in range(n):
        for j in range(i, n):
            a, b = types[i], types[j]
            for law, op, above, sets in (
                ("join", join, up, up),
                ("meet", meet, down, down),
            ):
                bounds = sets[i] & sets[j]
                try:
                    r = op(a, b)
                except LatticeError:
                    if bounds:
                        fail(f"{law} missing", a, b)
                    continue
                if r != op(b, a):
                    fail(f"{law} commutativity", a, b)
                k = index.get(r)
                if k is None:
                    fail(f"{law} escapes the type set", a, b)
                    continue
                if k not in bounds:
                    fail(f"{law} not a bound", a, b)
                elif not bounds <= above[k]:
                    fail(f"{law} not extremal", a, b)
    return {"types": n, **{law: bad[law] for law in sorted(bad)}}, examples
