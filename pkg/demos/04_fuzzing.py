# Checking the metatheory on generated programs.
from hmeff.harness import GenConfig, THEOREMS, fuzz, gen_well_typed
from hmeff.pretty import pretty

# Programs are generated type-first, so every one of them checks.
print(pretty(gen_well_typed(GenConfig(seed=3))))
print(pretty(gen_well_typed(GenConfig(seed=3, mode="dyn"))))

for theorem in THEOREMS:
    report = fuzz(theorem, seeds=40)
    print(report.summary())

# Failures come with a seed and a step index, so they can be replayed.
for mode in ("local", "coarse", "none"):
    report = fuzz("safety", seeds=40, mode=mode)
    print(mode, report.passed, "passed", [seed for seed, _ in report.failed])
