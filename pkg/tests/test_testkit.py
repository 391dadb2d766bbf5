import random

import pytest

from contextml import checker, evaluator
from contextml.checker import try_synth
from contextml.parser import parse
from contextml.syntax import LExp, Layer, Num, With, depth
from contextml.testkit.bigstep import big_step_eval
from contextml.testkit.declarative import (
    Derivations, Universe, check_agreement, enumerate_terms,
)
from contextml.testkit.generate import GenParams, gen_well_typed, generate_corpus, generate_sample
from contextml.testkit.lattice import check_lattice
from contextml.testkit.soundness import check_term, run_soundness_suite, shrink
from contextml.types import INT, ly, subtype

from .conftest import PRECONDITION_PROGRAM


def test_gen_depth_zero():
    rng = random.Random(1)
    for _ in range(20):
        assert isinstance(gen_well_typed(GenParams(max_depth=0), {}, (), INT, rng), Num)
        e = gen_well_typed(GenParams(max_depth=0), {}, (), ly("A", "B"), rng)
        assert e in (Layer("A"), Layer("B"))


def test_gen_params_validation():
    with pytest.raises(ValueError):
        GenParams(max_depth=-1)
    with pytest.raises(ValueError):
        GenParams(layer_universe=())


def test_generated_terms_typecheck_below_target(small_corpus):
    for s in small_corpus:
        t, diags = try_synth({}, frozenset(s.context), s.expr)
        assert not diags, (s.index, diags)
        assert subtype(t, s.target)
        assert depth(s.expr) <= 5


def test_corpus_reproducible():
    a = [s.expr for s in generate_corpus(GenParams(seed=3), 50)]
    b = [s.expr for s in generate_corpus(GenParams(seed=3), 50)]
    c = [s.expr for s in generate_corpus(GenParams(seed=4), 50)]
    assert a == b != c
    assert generate_sample(GenParams(seed=3), 17).expr == a[17]


def test_corpus_exercises_every_construct(small_corpus):
    from contextml.syntax import App, BinOp, Fun, If, Let, Var

    seen = set()

    def walk(e):
        seen.add(type(e))
        from contextml.syntax import children
        for k in children(e):
            walk(k)

    for s in small_corpus:
        walk(s.expr)
    assert {App, BinOp, Fun, If, Let, Var, With, LExp, Num, Layer} <= seen


def test_big_step_examples():
    assert big_step_eval(("L1",), parse(PRECONDITION_PROGRAM)).value == Num(0)
    assert big_step_eval((), With(Layer("A"), LExp((("A", Num(9)),)))).value == Num(9)
    r = big_step_eval(("A",), LExp((("B", Num(1)),)))
    assert r.status == "stuck" and r.code == "RUNTIME_DISPATCH"
    assert big_step_eval((), parse("(fun f (x: int) => f x) 1"), budget=1000).status == "budget"


def test_big_step_agrees_on_corpus(small_corpus):
    for s in small_corpus[:200]:
        small = evaluator.evaluate(s.context, s.expr, 10_000)
        big = big_step_eval(s.context, s.expr)
        if small.ok:
            assert big.value == small.value


def test_check_term_passes_on_good_program():
    res = check_term(("L1",), parse(PRECONDITION_PROGRAM))
    assert res.normalized and res.steps == 3
    assert all(v is None for v in res.results.values())


def test_check_term_reports_ill_typed():
    res = check_term((), parse("{A. 1}"))
    assert res.results["generator"].startswith("does not typecheck")


def test_shrink_keeps_failure():
    e = parse("let x = 3 in (x + {B. 1}) * 2")
    def stuck(c):
        return evaluator.evaluate((), c).status == "stuck"
    small = shrink(e, stuck)
    assert stuck(small)
    assert small == LExp((("B", Num(1)),))


def test_small_suite_is_clean():
    report = run_soundness_suite(GenParams(seed=11), 300)
    assert report.ok, report.summary()
    assert report.terms == 300 and report.checked["progress"] == 300


def test_shards_match_single_run():
    whole = run_soundness_suite(GenParams(seed=2), 60)
    parts = [run_soundness_suite(GenParams(seed=2), 30, start=s) for s in (0, 30)]
    assert whole.steps == sum(p.steps for p in parts)
    assert whole.normalizing == sum(p.normalizing for p in parts)


def test_tapp_mutation_found_and_shrunk(monkeypatch):
    monkeypatch.setattr(checker, "precondition_satisfied", lambda required, active: True)
    report = run_soundness_suite(GenParams(seed=0), 1500, max_failures=3)
    assert report.violations["progress"] > 0
    for f in report.failures:
        # each shrunk program still breaks the same property
        e = parse(f.shrunk)
        assert check_term(tuple(f.context), e, only=[f.property]).results[f.property] is not None
        assert len(f.shrunk) <= len(f.program)


def test_dispatch_mutation_found(monkeypatch):
    monkeypatch.setattr(evaluator, "dispatch",
                        lambda context, branches: _bottom_up(context, branches))
    report = run_soundness_suite(GenParams(seed=0), 1500, max_failures=3)
    assert report.violations["differential"] > 0


def _bottom_up(context, branches):
    for active in reversed(context):
        for i, name in enumerate(branches):
            if name == active:
                return i
    return None


def test_report_json():
    report = run_soundness_suite(GenParams(seed=5), 20)
    data = report.to_json()
    assert data["terms"] == 20
    assert set(data["properties"]) == {"generator", "progress", "dispatch",
                                       "preservation", "differential", "roundtrip"}


def test_declarative_small_cases():
    d = Derivations(Universe(("A", "B")))
    assert d.types_of(LExp((("A", Num(0)),)), (), frozenset()) == frozenset()
    assert d.types_of(LExp((("A", Num(0)),)), (), frozenset({"A"})) == {INT}
    assert d.types_of(Layer("A")) == {ly("A"), ly("A", "B")}
    # with over {A, B}: body must work under both pushes
    e = With(parse("if 0 then A else B"), LExp((("A", Num(0)),)))
    assert d.types_of(e) == frozenset()


def test_declarative_agreement_depth_two():
    stats, mismatches = check_agreement(2)
    assert stats["mismatches"] == 0, mismatches
    assert stats["accepted"] > 0
    assert len(enumerate_terms(2)) == stats["terms"]


def test_lattice_two_layers():
    counts, examples = check_lattice(("A", "B"), 2)
    assert counts == {"types": counts["types"]}, examples
