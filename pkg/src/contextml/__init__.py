"""ContextML: a functional core language with layers, dispatch and an annotated type system."""

from .checker import check_program, synth, try_synth
from .diagnostics import Diagnostic, DiagnosticError, ParseError, TypeCheckError
from .evaluator import dispatch, evaluate, step, trace
from .parser import parse, pretty, tokenize
from .syntax import free_vars, layers_of, push, substitute

__all__ = [
    "Diagnostic", "DiagnosticError", "ParseError", "TypeCheckError",
    "check_program", "dispatch", "evaluate", "free_vars", "layers_of", "parse",
    "pretty", "push", "step", "substitute", "synth", "tokenize", "trace", "try_synth",
]
