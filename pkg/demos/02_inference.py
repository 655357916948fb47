# Type-and-effect inference in the three signature modes.
from hmeff import syntax as s
from hmeff.eval import run, statesim
from hmeff.fixtures import H_DIV_SIGNATURE, fixture, h_div_program
from hmeff.infer import infer_closed, show_typing
from hmeff.parser import parse_computation, parse_signature
from hmeff.types import TypeCheckError

# A binding produced by an application is still generalised.
typing = infer_closed(fixture("id_id"))
for name, scheme, effects in typing.bindings:
    print(name, ":", show_typing(scheme, effects, "local"))
print("id id :", typing.show())

# The inferred types of the two state handlers differ only in whether
# the written value must match the read one.
for name in ("H_ST", "H_RO"):
    print(name, ":", infer_closed(s.Return(fixture(name))).show())

# Writing unit and reading a bool is fine only when the writes are dropped.
body = parse_computation("(set (); if get () then return 1 else return 2)")
for name in ("H_ST", "H_RO"):
    program = statesim(body, s.TRUE, fixture(name))
    try:
        infer_closed(program)
        print(name, "accepts it; the run gives", run(program).outcome.describe())
    except TypeCheckError as exc:
        print(name, "rejects it:", exc)

# A handler that resumes with a thunk re-performing its own operation.
sig = parse_signature(H_DIV_SIGNATURE)
try:
    infer_closed(h_div_program(), "local")
except TypeCheckError as exc:
    print("local mode:", exc)
print("coarse mode:", infer_closed(h_div_program(), "coarse", sig).show())
print("running it:", run(h_div_program(), fuel=100, detect_cycles=True).outcome.describe())
