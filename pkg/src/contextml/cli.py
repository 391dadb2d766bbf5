"""
Command line interface.

    contextml check FILE [--context L1,L2]
    contextml run   FILE [--context ...] [--fuel N] [--no-typecheck] [--format json]
    contextml trace FILE [--context ...] [--fuel N] [--no-typecheck] [--format json]
    contextml repl  [--context ...]
    contextml soundness [--count N] [--depth D] [--seed S] [--json PATH]

``--context L1,L2`` builds the initial stack with L1 on top.
"""
from __future__ import annotations

import argparse
import json
import sys

from .checker import try_synth
from .diagnostics import ParseError
from .evaluator import (
    DEFAULT_FUEL, evaluate, render_trace_json, render_trace_text, trace,
)
from .parser import parse, parse_layer_list, pretty
from .syntax import layers_of

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_STUCK = 3
EXIT_FUEL = 4
EXIT_USAGE = 5


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _context(text):
    try:
        return parse_layer_list(text)
    except ParseError as err:
        raise argparse.ArgumentTypeError(err.diagnostics[0].message) from None


def build_parser():
    parser = _ArgumentParser(prog="contextml", description="ContextML checker and interpreter")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def common(p, runs=True):
        p.add_argument("--context", type=_context, default=(),
                       help="initial layer stack, top first (e.g. A,B)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if runs:
            p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)
            p.add_argument("--no-typecheck", dest="typecheck", action="store_false")

    p = sub.add_parser("check", help="parse and typecheck a program")
    p.add_argument("file")
    common(p, runs=False)
    for name, text in (("run", "typecheck and evaluate a program"),
                       ("trace", "print every reduction step")):
        p = sub.add_parser(name, help=text)
        p.add_argument("file")
        common(p)
    p = sub.add_parser("repl", help="interactive session")
    p.add_argument("--context", type=_context, default=())
    p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)

    p = sub.add_parser("soundness", help="run the generated soundness suite")
    p.add_argument("--count", type=_positive, default=10_000)
    p.add_argument("--depth", type=_positive, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=_positive, default=10_000)
    p.add_argument("--json", dest="json_path", help="also write the report as JSON")
    return parser


class _Output:
    def __init__(self, fmt, stdout, stderr):
        self.json = fmt == "json"
        self.stdout = stdout
        self.stderr = stderr

    def emit(self, payload, text=None, error=False):
        if self.json:
            print(json.dumps(payload), file=self.stdout)
        elif text is not None:
            print(text, file=self.stderr if error else self.stdout)

    def diagnostics(self, status, diags, path):
        self.emit(
            {"status": status, "diagnostics": [d.to_json() for d in diags]},
            "\n".join(f"{path}:{d}" for d in diags),
            error=True,
        )


def _load(path, out):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None
    try:
        return parse(text)
    except ParseError as err:
        out.diagnostics("parse_error", err.diagnostics, path)
        return None


def _typecheck(e, args, out):
    t, diags = try_synth({}, layers_of(args.context), e)
    if diags:
        out.diagnostics("type_error", diags, args.file)
    return t


def _check(args, out):
    e = _load(args.file, out)
    if e is None:
        return EXIT_PARSE
    t = _typecheck(e, args, out)
    if t is None:
        return EXIT_TYPE
    out.emit({"status": "ok", "type": str(t)}, str(t))
    return EXIT_OK


def _status_exit(result):
    return {"value": EXIT_OK, "stuck": EXIT_STUCK, "fuel": EXIT_FUEL}[result.status]


def _run(args, out):
    e = _load(args.file, out)
    if e is None:
        return EXIT_PARSE
    t = None
    if args.typecheck:
        t = _typecheck(e, args, out)
        if t is None:
            return EXIT_TYPE
    result = evaluate(args.context, e, args.fuel)
    if result.status == "value":
        payload = {"status": "value", "value": pretty(result.value), "steps": result.steps}
        if t is not None:
            payload["type"] = str(t)
        out.emit(payload, pretty(result.value))
    elif result.status == "stuck":
        out.emit({"status": "stuck", "steps": result.steps,
                  "diagnostic": result.diagnostic.to_json()},
                 f"{args.file}:{result.diagnostic}", error=True)
    else:
        out.emit({"status": "fuel_exhausted", "steps": result.steps},
                 f"fuel exhausted after {result.steps} steps", error=True)
    return _status_exit(result)


def _trace(args, out):
    e = _load(args.file, out)
    if e is None:
        return EXIT_PARSE
    if args.typecheck and _typecheck(e, args, out) is None:
        return EXIT_TYPE
    tr = trace(args.context, e, args.fuel)
    if out.json:
        print(render_trace_json(tr), file=out.stdout)
    else:
        print(render_trace_text(tr), file=out.stdout)
    return _status_exit(tr.result)


def _repl(args, stdin, stdout):
    from .repl import Repl

    return Repl(args.context, stdin, stdout, args.fuel).run()


def _soundness(args, stdout):
    from .testkit.generate import GenParams
    from .testkit.soundness import run_soundness_suite

    params = GenParams(seed=args.seed, max_depth=args.depth)
    report = run_soundness_suite(params, args.count, args.fuel)
    print(report.summary(), file=stdout)
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
    return EXIT_OK if report.ok else EXIT_TYPE


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    wants_json = "json" in argv and "--format" in argv or "--format=json" in argv
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    try:
        args = build_parser().parse_args(argv)
        if args.command == "repl":
            return _repl(args, stdin, stdout)
        if args.command == "soundness":
            return _soundness(args, stdout)
        out = _Output(args.format, stdout, stderr)
        return {"check": _check, "run": _run, "trace": _trace}[args.command](args, out)
    except UsageError as err:
        if wants_json:
            print(json.dumps({"status": "usage_error", "message": str(err)}), file=stdout)
        else:
            print(f"contextml: {err}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
