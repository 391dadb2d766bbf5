import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from contextml.testkit.declarative import rule_subtype
from contextml.types import INT, Arrow, LatticeError, Ly, all_types, join, ly, meet, subtype


def test_subtype_examples():
    assert subtype(ly("A"), ly("A", "B"))
    assert subtype(INT, INT)
    assert subtype(Arrow(ly("A", "B"), frozenset({"L1"}), INT),
                   Arrow(ly("A"), frozenset({"L1", "L2"}), INT))
    assert not subtype(ly("A", "B"), ly("A"))
    assert not subtype(INT, ly())
    assert not subtype(Arrow(ly("A"), frozenset(), INT), Arrow(ly("A", "B"), frozenset(), INT))
    assert not subtype(Arrow(INT, frozenset({"A"}), INT), Arrow(INT, frozenset(), INT))


def _layer_types(universe):
    return [Ly(frozenset(c)) for r in range(len(universe) + 1)
            for c in itertools.combinations(universe, r)]


def _brute_lub(a, b, candidates):
    # least element among common upper bounds, by enumeration
    ups = [u for u in candidates if rule_subtype(a, u) and rule_subtype(b, u)]
    least = [u for u in ups if all(rule_subtype(u, w) for w in ups)]
    return least[0] if least else None


def _brute_glb(a, b, candidates):
    downs = [u for u in candidates if rule_subtype(u, a) and rule_subtype(u, b)]
    greatest = [u for u in downs if all(rule_subtype(w, u) for w in downs)]
    return greatest[0] if greatest else None


def test_join_meet_examples_against_enumeration():
    cands = [INT] + _layer_types("ABC")
    assert join(ly("A"), ly("B")) == ly("A", "B") == _brute_lub(ly("A"), ly("B"), cands)
    assert meet(ly("A", "B"), ly("B", "C")) == ly("B") == _brute_glb(ly("A", "B"), ly("B", "C"), cands)
    assert join(INT, INT) == INT
    assert meet(INT, INT) == INT


def test_join_meet_errors():
    with pytest.raises(LatticeError) as err:
        join(INT, ly("A"))
    assert err.value.code == "TYPE_JOIN"
    with pytest.raises(LatticeError) as err:
        meet(Arrow(INT, frozenset(), INT), INT)
    assert err.value.code == "TYPE_MEET"
    with pytest.raises(LatticeError):
        join(Arrow(INT, frozenset(), INT), Arrow(ly("A"), frozenset(), INT))


def test_arrow_join():
    f = Arrow(ly("A", "B"), frozenset({"X"}), ly("A"))
    g = Arrow(ly("B", "C"), frozenset({"Y"}), ly("C"))
    assert join(f, g) == Arrow(ly("B"), frozenset({"X", "Y"}), ly("A", "C"))
    assert meet(f, g) == Arrow(ly("A", "B", "C"), frozenset(), ly())


def test_brute_force_bounds_small_universe():
    cands = all_types("AB", 2)
    for a, b in itertools.product(all_types("AB", 2)[:60], repeat=2):
        try:
            j = join(a, b)
        except LatticeError:
            j = None
        assert j == _brute_lub(a, b, cands)


def test_subtype_matches_rules():
    ts = all_types("AB", 2)
    for a in ts[:120]:
        for b in ts:
            assert subtype(a, b) == rule_subtype(a, b)


base_types = st.one_of(
    st.just(INT),
    st.frozensets(st.sampled_from("ABCD")).map(Ly),
)
types = st.recursive(
    base_types,
    lambda inner: st.builds(Arrow, inner, st.frozensets(st.sampled_from("ABCD")), inner),
    max_leaves=6,
)


@given(types)
def test_reflexive(t):
    assert subtype(t, t)


@given(types, types)
def test_join_is_upper_bound(a, b):
    try:
        j = join(a, b)
    except LatticeError:
        return
    assert subtype(a, j) and subtype(b, j)


@given(types, types)
def test_meet_is_lower_bound(a, b):
    try:
        m = meet(a, b)
    except LatticeError:
        return
    assert subtype(m, a) and subtype(m, b)


def test_str():
    assert str(Arrow(Arrow(INT, frozenset(), INT), frozenset({"B", "A"}), ly("A"))) == \
        "(int -> int) -[{A, B}]-> ly{A}"
