import pytest

from contextml.parser import parse
from contextml.testkit.generate import GenParams, generate_corpus

PRECONDITION_PROGRAM = "let g = fun f (x:int) requires {L1} => {L1. 0} in g 3"

BATTERY_TEMPLATE = """
let threshold = 50 in
let getBatteryProfile = fun g (level: int) =>
  if level > threshold then PerformanceMode else PowerSavingMode in
let doSomeThing = fun d (u: int) => 1 in
let doSomeThingElse = fun d (u: int) => 2 in
with (getBatteryProfile {reading}) in
  {{ {branches} }}
"""

BOTH_BRANCHES = "PowerSavingMode. doSomeThing 0, PerformanceMode. doSomeThingElse 0"


def battery(reading, branches=BOTH_BRANCHES):
    return parse(BATTERY_TEMPLATE.format(reading=reading, branches=branches))


@pytest.fixture(scope="session")
def small_corpus():
    return list(generate_corpus(GenParams(seed=7), 500))
