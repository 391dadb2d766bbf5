"""
Big-step reference evaluator.

Written separately from the small-step machine and shares none of its
code; it only reuses substitution from the syntax module.  It serves as
a differential oracle: both must agree on every terminating program.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..syntax import App, BinOp, Fun, If, Layer, Let, LExp, Num, Var, With, substitute

DEFAULT_BUDGET = 200_000


class _Stuck(Exception):
    def __init__(self, code):
        self.code = code


class _OutOfBudget(Exception):
    pass


@dataclass(frozen=True)
class BigStepResult:
    status: str  # value | stuck | budget
    value: object = None
    code: Optional[str] = None


def _select(context, branches):
    # position in the stack of each branch's layer; lowest position wins,
    # ties go to the leftmost branch
    best = None
    for i, (name, body) in enumerate(branches):
        if name in context:
            key = (context.index(name), i)
            if best is None or key < best[0]:
                best = (key, body)
    if best is None:
        raise _Stuck("RUNTIME_DISPATCH")
    return best[1]


def _compute(op, a, b):
    table = {
        "+": lambda: a + b,
        "-": lambda: a - b if a > b else 0,
        "*": lambda: a * b,
        "/": lambda: a // b,
        "=": lambda: 1 if a == b else 0,
        "<": lambda: 1 if a < b else 0,
        ">": lambda: 1 if a > b else 0,
    }
    return table[op]()


class _BigStep:
    def __init__(self, budget):
        self.budget = budget

    def tick(self):
        self.budget -= 1
        if self.budget < 0:
            raise _OutOfBudget()

    def run(self, context, e):
        self.tick()
        if isinstance(e, (Num, Layer, Fun)):
            return e
        if isinstance(e, Var):
            raise _Stuck("RUNTIME_ILLFORMED")
        if isinstance(e, With):
            layer = self.run(context, e.layer)
            if not isinstance(layer, Layer):
                raise _Stuck("RUNTIME_ILLFORMED")
            return self.run((layer.name,) + context, e.body)
        if isinstance(e, LExp):
            return self.run(context, _select(context, e.branches))
        if isinstance(e, App):
            fn = self.run(context, e.fn)
            arg = self.run(context, e.arg)
            if not isinstance(fn, Fun):
                raise _Stuck("RUNTIME_ILLFORMED")
            body = substitute(fn.body, fn.x, arg)
            if fn.f != fn.x:
                body = substitute(body, fn.f, fn)
            return self.run(context, body)
        if isinstance(e, Let):
            return self.run(context, substitute(e.body, e.x, self.run(context, e.bound)))
        if isinstance(e, BinOp):
            a = self.run(context, e.left)
            b = self.run(context, e.right)
            if not (isinstance(a, Num) and isinstance(b, Num)):
                raise _Stuck("RUNTIME_ILLFORMED")
            if e.op == "/" and b.n == 0:
                raise _Stuck("RUNTIME_DIVZERO")
            return Num(_compute(e.op, a.n, b.n))
        if isinstance(e, If):
            cond = self.run(context, e.cond)
            if not isinstance(cond, Num):
                raise _Stuck("RUNTIME_ILLFORMED")
            return self.run(context, e.then if cond.n else e.orelse)
        raise TypeError(f"not an expression: {e!r}")


def big_step_eval(context, e, budget: int = DEFAULT_BUDGET) -> BigStepResult:
    """Evaluate ``e`` in ``context`` by structural recursion."""
    try:
        return BigStepResult("value", _BigStep(budget).run(tuple(context), e))
    except _Stuck as stuck:
        return BigStepResult("stuck", code=stuck.code)
    except (_OutOfBudget, RecursionError):
        return BigStepResult("budget")
