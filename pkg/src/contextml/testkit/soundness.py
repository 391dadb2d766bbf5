"""
Property suite for type soundness over a generated corpus.

For every generated program and context the suite checks

* ``generator``     - the term typechecks and its type is below the target,
* ``progress``      - evaluation never gets stuck,
* ``dispatch``      - in particular no layered expression fails to dispatch,
* ``preservation``  - each step keeps the least type or makes it smaller,
* ``differential``  - small-step and big-step evaluation agree,
* ``roundtrip``     - the printed program parses back to itself.

Failing programs are shrunk by replacing subterms with their own
subterms for as long as the same property keeps failing.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from .. import checker, evaluator
from ..diagnostics import ParseError
from ..parser import parse, pretty
from ..syntax import children, depth, free_vars, is_value, layers_of, with_children
from ..types import subtype
from .bigstep import big_step_eval
from .generate import GenParams, generate_sample

PROPERTIES = ("generator", "progress", "dispatch", "preservation", "differential", "roundtrip")


@dataclass
class TermCheck:
    """``results`` maps each checked property to None (pass) or a message.

    Properties that could not be checked, such as differential on a
    program that ran out of fuel, are absent.
    """

    results: dict
    steps: int = 0
    normalized: bool = False


def check_term(context, e, fuel=10_000, target=None, only=None) -> TermCheck:
    """Run the properties (all, or those in ``only``) on one program."""
    wanted = set(only or PROPERTIES)
    out = {}
    active = layers_of(context)
    t, diags = checker.try_synth({}, active, e)
    if diags:
        out["generator"] = f"does not typecheck: {diags[0]}"
        return TermCheck(out)
    out["generator"] = None
    if target is not None and not subtype(t, target):
        out["generator"] = f"type {t} is not below target {target}"

    if "roundtrip" in wanted:
        try:
            back = parse(pretty(e))
            out["roundtrip"] = None if back == e else "reparsed program differs"
        except ParseError as err:
            out["roundtrip"] = f"printed program does not parse: {err}"

    if not wanted & {"progress", "dispatch", "preservation", "differential"}:
        return TermCheck(_keep(out, wanted))
    check_pres = "preservation" in wanted
    cur, cur_t, steps = e, t, 0
    out["progress"] = out["dispatch"] = None
    if check_pres:
        out["preservation"] = None
    final = None
    while True:
        if is_value(cur):
            final = cur
            break
        if steps >= fuel:
            break
        r = evaluator.step(context, cur)
        if isinstance(r, evaluator.Stuck):
            out["progress"] = f"stuck after {steps} steps at {pretty(cur)}: {r.reason}"
            if r.reason.code == "RUNTIME_DISPATCH":
                out["dispatch"] = f"dispatch failed under {list(r.stack)}: {pretty(cur)}"
            break
        if check_pres:
            nt, ndiags = checker.try_synth({}, active, r.expr)
            if nt is None or not subtype(nt, cur_t):
                found = nt if nt is not None else ndiags[0]
                out["preservation"] = (
                    f"step {steps} ({r.rule}) {pretty(cur)} -> {pretty(r.expr)}: "
                    f"type {cur_t} became {found}"
                )
                check_pres = False
            else:
                cur_t = nt
        cur = r.expr
        steps += 1

    if "differential" in wanted and final is not None:
        big = big_step_eval(context, e)
        if big.status == "value":
            out["differential"] = None if big.value == final else (
                f"small-step gave {pretty(final)}, big-step gave {pretty(big.value)}"
            )
        elif big.status == "stuck":
            out["differential"] = f"small-step gave {pretty(final)}, big-step got stuck ({big.code})"
    return TermCheck(_keep(out, wanted), steps, final is not None)


def _keep(out, wanted):
    return {k: v for k, v in out.items() if k in wanted or k == "generator"}


def _candidates(e):
    # smaller programs first: closed subterms, then one child shrunk in place
    seen = []
    stack = list(children(e))
    while stack:
        k = stack.pop(0)
        if not free_vars(k):
            seen.append(k)
        stack.extend(children(k))
    yield from seen
    kids = children(e)
    for i, k in enumerate(kids):
        for smaller in _candidates(k):
            yield with_children(e, kids[:i] + (smaller,) + kids[i + 1:])


def shrink(e, still_fails, limit=500):
    """Greedy subterm-replacement shrinking; ``still_fails(e')`` decides acceptance."""
    tries = 0
    improved = True
    while improved and tries < limit:
        improved = False
        for cand in _candidates(e):
            tries += 1
            if tries > limit:
                break
            if still_fails(cand):
                e = cand
                improved = True
                break
    return e


@dataclass
class Failure:
    property: str
    index: int
    context: list
    program: str
    shrunk: str
    detail: str


@dataclass
class SoundnessReport:
    terms: int = 0
    normalizing: int = 0
    steps: int = 0
    max_depth: int = 0
    checked: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    violations: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def summary(self) -> str:
        lines = [f"{self.terms} terms, {self.normalizing} normalizing, "
                 f"{self.steps} steps, max depth {self.max_depth}, {self.seconds:.1f}s"]
        for p in PROPERTIES:
            status = "ok" if not self.violations[p] else "FAIL"
            lines.append(f"  {p:<13} {self.checked[p]:>7} checked  "
                         f"{self.violations[p]:>5} violations  {status}")
        for f in self.failures[:10]:
            lines.append(f"  [{f.property}] #{f.index} under {f.context}: {f.shrunk}")
            lines.append(f"      {f.detail}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "terms": self.terms,
            "normalizing": self.normalizing,
            "steps": self.steps,
            "max_depth": self.max_depth,
            "seconds": round(self.seconds, 3),
            "properties": {
                p: {"checked": self.checked[p], "violations": self.violations[p]}
                for p in PROPERTIES
            },
            "counterexamples": [asdict(f) for f in self.failures],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def run_soundness_suite(params: GenParams = None, count: int = 10_000, fuel: int = 10_000,
                        start: int = 0, max_failures: int = 20, shrink_failures: bool = True,
                        properties=PROPERTIES) -> SoundnessReport:
    """Generate ``count`` programs and check every property on each.

    ``start`` selects the first corpus index, so disjoint index ranges can
    be run as independent shards with identical results.
    """
    params = params or GenParams()
    report = SoundnessReport()
    began = time.perf_counter()
    for index in range(start, start + count):
        sample = generate_sample(params, index)
        checked = check_term(sample.context, sample.expr, fuel, sample.target, properties)
        report.terms += 1
        report.max_depth = max(report.max_depth, depth(sample.expr))
        report.steps += checked.steps
        report.normalizing += checked.normalized
        for prop, message in checked.results.items():
            report.checked[prop] += 1
            if message is None:
                continue
            report.violations[prop] += 1
            if len(report.failures) >= max_failures:
                continue
            shrunk = sample.expr
            if shrink_failures:
                def still_fails(cand, prop=prop):
                    return check_term(sample.context, cand, fuel, None, [prop]).results.get(prop) is not None
                shrunk = shrink(sample.expr, still_fails)
            detail = check_term(sample.context, shrunk, fuel, None, [prop]).results.get(prop) or message
            report.failures.append(Failure(prop, index, list(sample.context),
                                           pretty(sample.expr), pretty(shrunk), detail))
    report.seconds = time.perf_counter() - began
    return report
