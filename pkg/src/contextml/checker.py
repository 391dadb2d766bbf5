"""
Syntax-directed type synthesis.

The checker computes the least type of an expression under a type
environment and a static set of layers known to be active.  Subsumption
is applied only where it is needed: at arguments and declared return
types, and when merging the arms of ``if``, ``with`` and layered
expressions through ``join``.
"""
from __future__ import annotations

from . import diagnostics as diag
from .diagnostics import Diagnostic, TypeCheckError
from .syntax import App, BinOp, Fun, If, Layer, Let, LExp, Num, Var, With, free_vars
from .types import INT, Arrow, Int, LatticeError, Ly, format_layerset, join, subtype

MAX_WITH_DEPTH = 16


def precondition_satisfied(required, active) -> bool:
    """Can a function requiring ``required`` be applied where ``active`` holds?"""
    return required <= active


def dispatch_possible(branch_layers, active) -> bool:
    """Is some branch guaranteed to match in every context whose layers include ``active``?"""
    return any(name in active for name in branch_layers)


class _Checker:
    def __init__(self, max_with_depth=MAX_WITH_DEPTH):
        self.max_with_depth = max_with_depth
        self.with_depth = 0
        self.diagnostics = []
        self._seen = set()

    def report(self, code, message, e, expected=None, found=None):
        d = Diagnostic(code, message, e.span, expected=expected, found=found)
        key = (d.code, d.message, d.span, d.expected, d.found)
        if key not in self._seen:
            self._seen.add(key)
            self.diagnostics.append(d)

    def join_all(self, types, e):
        result = types[0]
        for t in types[1:]:
            try:
                result = join(result, t)
            except LatticeError:
                self.report(diag.TYPE_JOIN, "branches have incompatible types", e,
                            expected=str(result), found=str(t))
                return None
        return result

    def synth(self, env, active, e):
        if isinstance(e, Num):
            return INT
        if isinstance(e, Layer):
            return Ly(frozenset((e.name,)))
        if isinstance(e, Var):
            t = env.get(e.name)
            if t is None:
                self.report(diag.TYPE_UNBOUND, f"unbound variable {e.name}", e)
            return t

        if isinstance(e, Fun):
            if e.ret_ty is None and e.f != e.x and e.f in free_vars(e.body):
                self.report(diag.TYPE_NEEDANNOT,
                            f"recursive function {e.f} needs a return type annotation", e)
                return None
            inner = dict(env)
            if e.ret_ty is not None:
                inner[e.f] = Arrow(e.param_ty, e.precond, e.ret_ty)
            inner[e.x] = e.param_ty
            body = self.synth(inner, e.precond, e.body)
            if body is None:
                return None
            if e.ret_ty is None:
                return Arrow(e.param_ty, e.precond, body)
            if not subtype(body, e.ret_ty):
                self.report(diag.TYPE_MISMATCH, f"body of {e.f} does not match its return type",
                            e.body, expected=str(e.ret_ty), found=str(body))
            return Arrow(e.param_ty, e.precond, e.ret_ty)

        if isinstance(e, App):
            fn = self.synth(env, active, e.fn)
            arg = self.synth(env, active, e.arg)
            if fn is None or arg is None:
                return None
            if not isinstance(fn, Arrow):
                self.report(diag.TYPE_MISMATCH, "applying a non-function", e.fn,
                            expected="a function type", found=str(fn))
                return None
            if not subtype(arg, fn.dom):
                self.report(diag.TYPE_MISMATCH, "argument type does not match", e.arg,
                            expected=str(fn.dom), found=str(arg))
            if not precondition_satisfied(fn.pre, active):
                missing = fn.pre - active
                self.report(diag.TYPE_PRECOND,
                            "function requires inactive layers " + format_layerset(missing), e,
                            expected=format_layerset(fn.pre), found=format_layerset(active))
            return fn.cod

        if isinstance(e, Let):
            bound = self.synth(env, active, e.bound)
            if bound is None:
                return None
            inner = dict(env)
            inner[e.x] = bound
            return self.synth(inner, active, e.body)

        if isinstance(e, BinOp):
            ok = True
            for operand in (e.left, e.right):
                t = self.synth(env, active, operand)
                if t is None:
                    ok = False
                elif not isinstance(t, Int):
                    self.report(diag.TYPE_MISMATCH, f"operand of {e.op} must be an integer",
                                operand, expected="int", found=str(t))
                    ok = False
            return INT if ok else None

        if isinstance(e, If):
            cond = self.synth(env, active, e.cond)
            if cond is not None and not isinstance(cond, Int):
                self.report(diag.TYPE_MISMATCH, "condition must be an integer", e.cond,
                            expected="int", found=str(cond))
            then = self.synth(env, active, e.then)
            orelse = self.synth(env, active, e.orelse)
            if then is None or orelse is None:
                return None
            return self.join_all([then, orelse], e)

        if isinstance(e, With):
            layer = self.synth(env, active, e.layer)
            if layer is None:
                return None
            if not isinstance(layer, Ly):
                self.report(diag.TYPE_MISMATCH, "with expects a layer", e.layer,
                            expected="ly{...}", found=str(layer))
                return None
            if not layer.layers:
                self.report(diag.TYPE_EMPTYLAYERSET, "with over an expression that yields no layer",
                            e.layer, found=str(layer))
                return None
            if self.with_depth >= self.max_with_depth:
                self.report(diag.TYPE_DEPTH,
                            f"more than {self.max_with_depth} nested with expressions", e)
                return None
            self.with_depth += 1
            try:
                arms = [self.synth(env, active | {name}, e.body) for name in sorted(layer.layers)]
            finally:
                self.with_depth -= 1
            if any(t is None for t in arms):
                return None
            return self.join_all(arms, e)

        if isinstance(e, LExp):
            if not dispatch_possible(e.layers, active):
                self.report(diag.TYPE_DISPATCH,
                            "none of the layers " + ", ".join(e.layers) + " is guaranteed active", e,
                            expected="one of " + format_layerset(e.layers),
                            found=format_layerset(active))
            arms = [self.synth(env, active, body) for _, body in e.branches]
            if any(t is None for t in arms):
                return None
            return self.join_all(arms, e)

        raise TypeError(f"not an expression: {e!r}")


def try_synth(env, active, e, max_with_depth=MAX_WITH_DEPTH):
    """Return ``(type, diagnostics)``; the type is None when checking failed."""
    checker = _Checker(max_with_depth)
    t = checker.synth(dict(env), frozenset(active), e)
    if checker.diagnostics:
        return None, checker.diagnostics
    return t, []


def synth(env, active, e, max_with_depth=MAX_WITH_DEPTH):
    """Least type of ``e``; raises TypeCheckError listing every diagnostic found."""
    t, diagnostics = try_synth(env, active, e, max_with_depth)
    if diagnostics:
        raise TypeCheckError(diagnostics)
    return t


def check_program(e, initial=frozenset(), max_with_depth=MAX_WITH_DEPTH):
    """Type of a closed program run in a context whose active layers are ``initial``."""
    return synth({}, frozenset(initial), e, max_with_depth)
