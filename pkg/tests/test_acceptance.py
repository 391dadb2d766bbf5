"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""
import time

import pytest

from contextml import checker, evaluator
from contextml.checker import try_synth
from contextml.evaluator import evaluate
from contextml.parser import parse, pretty
from contextml.syntax import Num
from contextml.testkit.declarative import check_agreement
from contextml.testkit.generate import GenParams
from contextml.testkit.lattice import check_lattice
from contextml.testkit.soundness import run_soundness_suite
from contextml.types import INT, Arrow

from .conftest import PRECONDITION_PROGRAM, battery

CORPUS = dict(count=10_000, fuel=10_000)


@pytest.fixture
def report_line(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return emit


@pytest.fixture(scope="module")
def corpus_report():
    params = GenParams(seed=0, max_depth=5, layer_universe={"A", "B", "C"})
    return run_soundness_suite(params, **CORPUS)


def test_precondition_golden(report_line):
    began = time.perf_counter()
    e = parse(PRECONDITION_PROGRAM)
    t, diags = try_synth({}, frozenset({"L1"}), e)
    g_type = checker.synth({}, frozenset({"L1"}), e.bound)
    value = evaluate(("L1",), e).value
    _, empty = try_synth({}, frozenset(), e)
    elapsed = time.perf_counter() - began
    ok = (t == INT and not diags and g_type == Arrow(INT, frozenset({"L1"}), INT)
          and value == Num(0) and [d.code for d in empty] == ["TYPE_PRECOND"] and elapsed < 1)
    report_line("precondition golden", ok,
                f"type {t}, g : {g_type}, value {pretty(value)}, empty context {[d.code for d in empty]}, "
                f"{elapsed:.3f}s")
    assert ok


def test_battery_golden(report_line):
    began = time.perf_counter()
    profile = checker.synth({}, frozenset(), parse(
        "fun g (level: int) => if level > 50 then PerformanceMode else PowerSavingMode"))
    results = {}
    for reading in (80, 20):
        t, diags = try_synth({}, frozenset(), battery(reading))
        results[reading] = (t, diags, evaluate((), battery(reading)))
    removed = []
    for branch in ("PowerSavingMode. doSomeThing 0", "PerformanceMode. doSomeThingElse 0"):
        _, diags = try_synth({}, frozenset(), battery(80, branch))
        removed.append(sorted({d.code for d in diags}))
    elapsed = time.perf_counter() - began
    ok = (str(profile) == "int -> ly{PerformanceMode, PowerSavingMode}"
          and all(t == INT and not d and r.ok for t, d, r in results.values())
          and removed == [["TYPE_DISPATCH"], ["TYPE_DISPATCH"]] and elapsed < 1)
    values = {k: str(r.value.n) if r.ok else r.status for k, (_, _, r) in results.items()}
    report_line("battery golden", ok,
                f"profile {profile}, values {values}, branch removed {removed}, {elapsed:.3f}s")
    assert ok


def test_progress_suite(corpus_report, report_line):
    r = corpus_report
    ok = (r.terms == 10_000 and r.max_depth <= 5 and r.violations["progress"] == 0
          and r.violations["dispatch"] == 0 and r.violations["generator"] == 0 and r.seconds < 60)
    report_line("progress", ok,
                f"{r.terms} terms, max depth {r.max_depth}, {r.violations['progress']} stuck, "
                f"{r.violations['generator']} ill-typed, {r.seconds:.1f}s")
    assert ok, r.summary()


def test_subject_reduction_suite(corpus_report, report_line):
    r = corpus_report
    ok = r.checked["preservation"] == r.terms and r.violations["preservation"] == 0 and r.seconds < 60
    report_line("subject reduction", ok,
                f"{r.steps} steps over {r.terms} terms, {r.violations['preservation']} violations, "
                f"{r.seconds:.1f}s (shared run)")
    assert ok, r.summary()


def test_differential_oracle(corpus_report, report_line):
    r = corpus_report
    agreed = r.checked["differential"] - r.violations["differential"]
    ok = r.normalizing > 0 and agreed == r.normalizing
    report_line("differential oracle", ok,
                f"{agreed}/{r.normalizing} normalizing terms agree "
                f"({100 * agreed / max(r.normalizing, 1):.1f}%)")
    assert ok, r.summary()


def test_declarative_agreement(report_line):
    began = time.perf_counter()
    stats, mismatches = check_agreement(3, ("A", "B"))
    elapsed = time.perf_counter() - began
    ok = stats["mismatches"] == 0 and elapsed < 120
    report_line("declarative agreement", ok,
                f"{stats['terms']} terms x 4 contexts, {stats['accepted']} accepted, "
                f"{stats['mismatches']} mismatches, {elapsed:.1f}s")
    assert ok, mismatches


def test_subtype_lattice(report_line):
    counts, examples = check_lattice(("A", "B", "C"), 2)
    violations = sum(v for k, v in counts.items() if k != "types")
    ok = violations == 0
    report_line("subtype lattice", ok, f"{counts['types']} types, {violations} violations")
    assert ok, examples


def test_parser_roundtrip(corpus_report, report_line):
    r = corpus_report
    ok = r.checked["roundtrip"] == r.terms and r.violations["roundtrip"] == 0
    report_line("parser round-trip", ok,
                f"{r.checked['roundtrip']} terms, {r.violations['roundtrip']} violations")
    assert ok, r.summary()


def _bottom_up_dispatch(context, branches):
    for active in reversed(context):
        for i, name in enumerate(branches):
            if name == active:
                return i
    return None


def test_mutation_sensitivity(monkeypatch, report_line):
    params = GenParams(seed=0)
    with monkeypatch.context() as m:
        m.setattr(checker, "precondition_satisfied", lambda required, active: True)
        tapp = run_soundness_suite(params, max_failures=1, **CORPUS)
    with monkeypatch.context() as m:
        m.setattr(evaluator, "dispatch", _bottom_up_dispatch)
        scan = run_soundness_suite(params, max_failures=1, **CORPUS)
    found_tapp = tapp.violations["progress"]
    found_scan = scan.violations["differential"] + scan.violations["progress"]
    ok = found_tapp >= 1 and found_scan >= 1
    example = tapp.failures[0].shrunk if tapp.failures else "none"
    report_line("mutation sensitivity", ok,
                f"no precondition check: {found_tapp} stuck (e.g. {example}); "
                f"bottom-up dispatch: {scan.violations['differential']} differential mismatches")
    assert ok
