"""Structured diagnostics shared by the parser, checker and evaluator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import Span

# Parse errors
PARSE_BADCHAR = "PARSE001"
PARSE_UNEXPECTED = "PARSE002"
PARSE_EOF = "PARSE003"
PARSE_BADNAME = "PARSE004"

# Type errors
TYPE_UNBOUND = "TYPE_UNBOUND"
TYPE_MISMATCH = "TYPE_MISMATCH"
TYPE_PRECOND = "TYPE_PRECOND"
TYPE_DISPATCH = "TYPE_DISPATCH"
TYPE_NEEDANNOT = "TYPE_NEEDANNOT"
TYPE_EMPTYLAYERSET = "TYPE_EMPTYLAYERSET"
TYPE_JOIN = "TYPE_JOIN"
TYPE_MEET = "TYPE_MEET"
TYPE_DEPTH = "TYPE_DEPTH"

# Run-time stuck states
RUNTIME_DISPATCH = "RUNTIME_DISPATCH"
RUNTIME_DIVZERO = "RUNTIME_DIVZERO"
RUNTIME_ILLFORMED = "RUNTIME_ILLFORMED"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Optional[Span] = None
    expected: Optional[str] = None
    found: Optional[str] = None
    severity: str = "error"

    def to_json(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.span is not None:
            out.update(
                line=self.span.line,
                col=self.span.col,
                end_line=self.span.end_line,
                end_col=self.span.end_col,
            )
        else:
            out.update(line=None, col=None, end_line=None, end_col=None)
        if self.expected is not None:
            out["expected"] = self.expected
        if self.found is not None:
            out["found"] = self.found
        return out

    def __str__(self):
        where = f"{self.span.line}:{self.span.col}: " if self.span else ""
        text = f"{where}{self.severity} {self.code}: {self.message}"
        if self.expected is not None or self.found is not None:
            text += f" (expected {self.expected}, found {self.found})"
        return text


class DiagnosticError(Exception):
    """Carries one or more diagnostics out of a failed phase."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ParseError(DiagnosticError):
    pass


class TypeCheckError(DiagnosticError):
    pass
