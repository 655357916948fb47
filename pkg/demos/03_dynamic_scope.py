# Dynamically scoped parameters and their translation into handlers.
from hmeff.dynstate import dyn_check, dyn_run
from hmeff.eval import run
from hmeff.fixtures import PROPOSITION_PARAMS, fixture, fixture_source
from hmeff.parser import parse_type
from hmeff.pretty import pretty
from hmeff.translate import COARSE, GROUND, NonGroundSignature, translate_program, translate_term
from hmeff.types import INT

example = fixture("dyn_example")
print(fixture_source("dyn_example").strip())
print("type:", dyn_check({"p": INT}, example).show())
print("dynamic semantics:", dyn_run(example).outcome.describe())

# Each parameter becomes a get/set pair and each dlet a state handler.
translated = translate_term(example)
print(pretty(translated))
print("handler semantics:", run(translated).outcome.describe())
print(translate_program(example, {"p": INT}, GROUND))

# A parameter holding a function can call itself through the cell.
loop = fixture("proposition")
params = {"p": parse_type(PROPOSITION_PARAMS["p"])}
print("type:", dyn_check(params, loop).show())
print(dyn_run(loop, fuel=20, detect_cycles=True).outcome.describe())

# Its translated signature would mention itself, so only the coarse
# translation applies.
try:
    translate_program(loop, params, GROUND)
except NonGroundSignature as exc:
    print("ground translation:", exc)
print(translate_program(loop, params, COARSE))
