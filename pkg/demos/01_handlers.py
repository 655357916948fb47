# Running handlers step by step.
from hmeff import syntax as s
from hmeff.eval import run, statesim
from hmeff.fixtures import fixture, fixture_source
from hmeff.pretty import format_trace, pretty

# The toggle computation reads a boolean and writes its negation.
toggle = fixture("T")
print(fixture_source("T").strip())

# A handler that answers every get with true and ignores every set.
constant = fixture("H_C")
trace = run(s.Handle(constant, toggle))
print(trace.outcome.describe(), "after", trace.fuel_used, "steps")

# The parameter-passing handler turns a stateful computation into a
# function of the initial state; statesim applies it to that state.
for start in (s.TRUE, s.FALSE):
    out = run(statesim(toggle, start)).outcome
    print("toggle from", pretty(start), "->", out.describe())

# Each step of reading the state, printed in full.
print(format_trace(run(statesim(s.App(s.generic_effect("get"), s.UNIT), s.IntLit(7)))))

# An operation that no handler catches is forwarded outwards and ends the run.
print(run(s.Handle(constant, s.op_call("flip", s.UNIT))).outcome.describe())
