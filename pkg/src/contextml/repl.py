"""Interactive read-eval-print loop with a mutable session context."""
from __future__ import annotations

import sys

from .checker import try_synth
from .diagnostics import ParseError
from .evaluator import DEFAULT_FUEL, evaluate, format_stack
from .parser import Binding, parse, parse_toplevel, pretty
from .syntax import is_layer_name, layers_of, pop, push, substitute

HELP = """\
expressions are evaluated in the session context
  let x = e      bind x for the rest of the session
  :ctx           show the layer stack (top first)
  :push L        activate layer L
  :pop           deactivate the top layer
  :type e        show the type of e
  :help          this text
  :quit          leave"""


class Repl:
    def __init__(self, context=(), stdin=None, stdout=None, fuel=DEFAULT_FUEL):
        self.context = tuple(context)
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.fuel = fuel
        self.bindings = []  # (name, value, type), oldest first

    def say(self, text):
        print(text, file=self.stdout)

    @property
    def env(self):
        return {name: t for name, _, t in self.bindings}

    def close(self, e):
        for name, value, _ in reversed(self.bindings):
            e = substitute(e, name, value)
        return e

    def typecheck(self, e):
        t, diagnostics = try_synth(self.env, layers_of(self.context), e)
        for d in diagnostics:
            self.say(str(d))
        return t

    def run_expr(self, e):
        t = self.typecheck(e)
        if t is None:
            return None
        result = evaluate(self.context, self.close(e), self.fuel)
        if result.status == "value":
            return result.value, t
        if result.status == "stuck":
            self.say(f"stuck: {result.diagnostic}")
        else:
            self.say(f"fuel exhausted after {result.steps} steps")
        return None

    def handle(self, line):
        """Process one input line; returns False when the session should end."""
        line = line.strip()
        if not line or line.startswith("--"):
            return True
        if line.startswith(":"):
            return self.command(line)
        try:
            item = parse_toplevel(line)
        except ParseError as err:
            for d in err.diagnostics:
                self.say(str(d))
            return True
        if isinstance(item, Binding):
            out = self.run_expr(item.expr)
            if out is not None:
                value, t = out
                self.bindings.append((item.name, value, t))
                self.say(f"{item.name} : {t} = {pretty(value)}")
        else:
            out = self.run_expr(item)
            if out is not None:
                value, t = out
                self.say(f"{pretty(value)} : {t}")
        return True

    def command(self, line):
        name, _, arg = line.partition(" ")
        arg = arg.strip()
        if name in (":quit", ":q"):
            return False
        if name == ":help":
            self.say(HELP)
        elif name == ":ctx":
            self.say(format_stack(self.context))
        elif name == ":push":
            if not is_layer_name(arg):
                self.say(f"not a layer name: {arg!r}")
            else:
                self.context = push(self.context, arg)
                self.say(format_stack(self.context))
        elif name == ":pop":
            if not self.context:
                self.say("the context is empty")
            else:
                self.context = pop(self.context)
                self.say(format_stack(self.context))
        elif name == ":type":
            try:
                e = parse(arg)
            except ParseError as err:
                for d in err.diagnostics:
                    self.say(str(d))
                return True
            t = self.typecheck(e)
            if t is not None:
                self.say(str(t))
        else:
            self.say(f"unknown command {name}; try :help")
        return True

    def run(self, prompt="cml> "):
        interactive = self.stdin.isatty() if hasattr(self.stdin, "isatty") else False
        while True:
            if interactive:
                self.stdout.write(prompt)
                self.stdout.flush()
            line = self.stdin.readline()
            if not line:
                return 0
            if not self.handle(line):
                return 0
