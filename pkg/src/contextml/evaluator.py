"""
Small-step call-by-value semantics with an explicit layer context.

``step(C, e)`` performs exactly one reduction of the closed expression
``e`` in the context ``C`` (a tuple of layer names, top first).  A
``with (L) in e`` pushes ``L`` only for the premise that steps ``e``; the
scope ends when the body becomes a value and the ``with`` node vanishes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import diagnostics as diag
from .diagnostics import Diagnostic
from .parser import pretty
from .syntax import (
    App, BinOp, Fun, If, Layer, Let, LExp, Num, Var, With, is_value, push, substitute,
)

DEFAULT_FUEL = 1_000_000


@dataclass(frozen=True)
class Stepped:
    expr: object
    rule: str
    # stack in force at the redex; differs from C under enclosing withs
    stack: tuple = ()


@dataclass(frozen=True)
class IsValue:
    value: object


@dataclass(frozen=True)
class Stuck:
    reason: Diagnostic
    stack: tuple = ()


def dispatch(context, branch_layers) -> Optional[int]:
    """Index of the branch selected by the context, or None when nothing matches.

    The stack is scanned from the top; the first entry guarding some branch
    decides, and among branches guarded by that layer the leftmost wins.
    """
    for active in context:
        for i, name in enumerate(branch_layers):
            if name == active:
                return i
    return None


def _stuck(code, message, e, context):
    return Stuck(Diagnostic(code, message, e.span), tuple(context))


def _arith(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return max(a - b, 0)
    if op == "*":
        return a * b
    if op == "/":
        return a // b
    if op == "=":
        return int(a == b)
    if op == "<":
        return int(a < b)
    if op == ">":
        return int(a > b)
    raise ValueError(op)


def step(context, e):
    """One reduction step; returns Stepped, IsValue or Stuck."""
    context = tuple(context)
    if is_value(e):
        return IsValue(e)

    if isinstance(e, With):
        if not is_value(e.layer):
            r = step(context, e.layer)
            if isinstance(r, Stepped):
                return Stepped(With(r.expr, e.body, e.span), r.rule, r.stack)
            return r
        if not isinstance(e.layer, Layer):
            return _stuck(diag.RUNTIME_ILLFORMED, "with expects a layer", e.layer, context)
        if is_value(e.body):
            return Stepped(e.body, "with2", context)
        r = step(push(context, e.layer.name), e.body)
        if isinstance(r, Stepped):
            return Stepped(With(e.layer, r.expr, e.span), r.rule, r.stack)
        return r

    if isinstance(e, LExp):
        i = dispatch(context, e.layers)
        if i is None:
            return _stuck(
                diag.RUNTIME_DISPATCH,
                "no active layer matches " + ", ".join(e.layers),
                e, context,
            )
        return Stepped(e.branches[i][1], "lexp", context)

    if isinstance(e, App):
        if not is_value(e.fn):
            r = step(context, e.fn)
            return Stepped(App(r.expr, e.arg, e.span), r.rule, r.stack) if isinstance(r, Stepped) else r
        if not is_value(e.arg):
            r = step(context, e.arg)
            return Stepped(App(e.fn, r.expr, e.span), r.rule, r.stack) if isinstance(r, Stepped) else r
        fn = e.fn
        if not isinstance(fn, Fun):
            return _stuck(diag.RUNTIME_ILLFORMED, "application of a non-function", e, context)
        body = substitute(fn.body, fn.x, e.arg)
        if fn.f != fn.x:
            body = substitute(body, fn.f, fn)
        return Stepped(body, "app", context)

    if isinstance(e, Let):
        if not is_value(e.bound):
            r = step(context, e.bound)
            return Stepped(Let(e.x, r.expr, e.body, e.span), r.rule, r.stack) if isinstance(r, Stepped) else r
        return Stepped(substitute(e.body, e.x, e.bound), "let", context)

    if isinstance(e, BinOp):
        if not is_value(e.left):
            r = step(context, e.left)
            return Stepped(BinOp(e.op, r.expr, e.right, e.span), r.rule, r.stack) if isinstance(r, Stepped) else r
        if not is_value(e.right):
            r = step(context, e.right)
            return Stepped(BinOp(e.op, e.left, r.expr, e.span), r.rule, r.stack) if isinstance(r, Stepped) else r
        if not (isinstance(e.left, Num) and isinstance(e.right, Num)):
            return _stuck(diag.RUNTIME_ILLFORMED, f"operator {e.op} expects integers", e, context)
        if e.op == "/" and e.right.n == 0:
            return _stuck(diag.RUNTIME_DIVZERO, "division by zero", e, context)
        return Stepped(Num(_arith(e.op, e.left.n, e.right.n), e.span), "op", context)

    if isinstance(e, If):
        if not is_value(e.cond):
            r = step(context, e.cond)
            return Stepped(If(r.expr, e.then, e.orelse, e.span), r.rule, r.stack) if isinstance(r, Stepped) else r
        if not isinstance(e.cond, Num):
            return _stuck(diag.RUNTIME_ILLFORMED, "if expects an integer condition", e.cond, context)
        return Stepped(e.then if e.cond.n != 0 else e.orelse, "if", context)

    if isinstance(e, Var):
        return _stuck(diag.RUNTIME_ILLFORMED, f"unbound variable {e.name}", e, context)
    raise TypeError(f"not an expression: {e!r}")


@dataclass
class EvalResult:
    """Outcome of running to a normal form: ``status`` is value, stuck or fuel."""

    status: str
    steps: int
    value: object = None
    diagnostic: Optional[Diagnostic] = None
    expr: object = None  # last configuration reached

    @property
    def ok(self):
        return self.status == "value"


def evaluate(context, e, fuel: int = DEFAULT_FUEL) -> EvalResult:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    context = tuple(context)
    steps = 0
    while True:
        if is_value(e):
            return EvalResult("value", steps, value=e, expr=e)
        if steps >= fuel:
            return EvalResult("fuel", steps, expr=e)
        r = step(context, e)
        if isinstance(r, Stuck):
            return EvalResult("stuck", steps, diagnostic=r.reason, expr=e)
        e = r.expr
        steps += 1


@dataclass(frozen=True)
class Config:
    context: tuple
    expr: object
    rule: Optional[str] = None  # rule that produced this configuration
    stack: Optional[tuple] = None  # stack in force at that rule's redex


@dataclass
class Trace:
    configs: list = field(default_factory=list)
    result: EvalResult = None


def trace(context, e, fuel: int = DEFAULT_FUEL) -> Trace:
    """Every configuration from ``e`` to its normal form, plus the final result."""
    context = tuple(context)
    out = Trace([Config(context, e)])
    steps = 0
    while True:
        if is_value(e):
            out.result = EvalResult("value", steps, value=e, expr=e)
            return out
        if steps >= fuel:
            out.result = EvalResult("fuel", steps, expr=e)
            return out
        r = step(context, e)
        if isinstance(r, Stuck):
            out.result = EvalResult("stuck", steps, diagnostic=r.reason, expr=e)
            return out
        e = r.expr
        steps += 1
        out.configs.append(Config(context, e, r.rule, r.stack))


def format_stack(stack) -> str:
    return "[" + ",".join(stack) + "]"


def render_trace_text(tr: Trace) -> str:
    lines = []
    for cfg in tr.configs:
        line = f"{format_stack(cfg.context)} |- {pretty(cfg.expr)}"
        if cfg.rule is not None:
            line += f"    -- {cfg.rule} under {format_stack(cfg.stack)}"
        lines.append(line)
    res = tr.result
    if res.status == "stuck":
        lines.append(f"stuck: {res.diagnostic}")
    elif res.status == "fuel":
        lines.append(f"fuel exhausted after {res.steps} steps")
    return "\n".join(lines)


def render_trace_json(tr: Trace) -> str:
    lines = []
    for cfg in tr.configs:
        lines.append(json.dumps({
            "stack": list(cfg.context),
            "expr": pretty(cfg.expr),
            "rule": cfg.rule,
            "redex_stack": None if cfg.stack is None else list(cfg.stack),
        }))
    res = tr.result
    final = {"status": res.status, "steps": res.steps}
    if res.status == "value":
        final["value"] = pretty(res.value)
    elif res.status == "stuck":
        final["diagnostic"] = res.diagnostic.to_json()
    lines.append(json.dumps(final))
    return "\n".join(lines)
