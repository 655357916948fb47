"""Random well-typed programs and executable checks of the metatheory.

Every check returns a :class:`Verdict`.  A failed verdict carries a witness
from which the failure can be replayed: the generator seed (when the term
was generated), the step index and the offending term.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from . import syntax as s
from .dynstate import dyn_check, dyn_step
from .eval import DEFAULT_FUEL, Stepped, Stuck, Terminal, TerminalOp, canonical_key, statesim, step
from .infer import check_against, infer_closed
from .pretty import pretty
from .translate import (COARSE, GROUND, NonGroundSignature, signature_of, translate_signature,
                        translate_term, translate_type)
from .types import BOOL, INT, UNIT, CType, Sig, TArrow, TCon, TypeCheckError, arrow

SEARCH_BOUND = 200

# Operations available to generated handler-calculus programs.
PALETTE = {
    "get": (UNIT, INT),
    "set": (INT, UNIT),
    "flip": (UNIT, BOOL),
    "tick": (UNIT, UNIT),
}
STATE_OPS = ("get", "set")
# Parameters available to generated dyn programs.
PARAMS = {"p": INT, "q": BOOL}


@dataclass
class Verdict:
    theorem: str
    passed: bool
    witness: Optional[dict] = None
    steps: int = 0
    note: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        text = f"{tag} {self.theorem} steps={self.steps}"
        if self.note:
            text += f" {self.note}"
        if self.witness:
            text += f" witness={self.witness}"
        return text


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 6
    mode: str = "local"        # local | coarse | none | stateful | dyn
    op_budget: int = 4
    param_budget: int = 2


# ---------------------------------------------------------------------------
# Generation


_BASE = (BOOL, UNIT, INT)


class _Gen:
    """Type-directed generator.  Types are base types or ``base → base``."""

    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.names = 0
        if cfg.mode == "stateful":
            self.ops = {op: PALETTE[op] for op in STATE_OPS}
        elif cfg.mode == "dyn":
            self.ops = {}
        else:
            self.ops = dict(list(PALETTE.items())[:max(0, cfg.op_budget)])
        self.params = dict(list(PARAMS.items())[:max(1, cfg.param_budget)])
        self.dyn = cfg.mode == "dyn"
        self.handlers = cfg.mode not in ("stateful", "dyn")
        self.pure = False

    def name(self, base: str) -> str:
        self.names += 1
        return f"{base}{self.names}"

    def gtype(self, arrows: bool = True):
        if arrows and self.rng.random() < 0.25:
            return arrow(self.rng.choice(_BASE), self.rng.choice(_BASE))
        return self.rng.choice(_BASE)

    # values ---------------------------------------------------------------

    def value(self, ty, depth: int, env: list):
        cands = [x for x, t, poly in env if t == ty]
        if isinstance(ty, TArrow):
            cands += [x for x, t, poly in env if poly and ty.dom == ty.cod.carrier]
        if cands and self.rng.random() < 0.6:
            return s.Var(self.rng.choice(cands))
        match ty:
            case TCon("bool"):
                return s.Bool(self.rng.random() < 0.5)
            case TCon("unit"):
                return s.UNIT
            case TCon("int"):
                return s.IntLit(self.rng.randint(0, 3))
            case TArrow(a, CType(b, _)):
                x = self.name("x")
                return s.Lam(x, self.comp(b, depth - 1, env + [(x, a, False)]))
        raise TypeError(ty)

    # computations ---------------------------------------------------------

    def comp(self, ty, depth: int, env: list):
        if depth <= 1:
            return s.Return(self.value(ty, 1, env))
        forms = ["do", "do", "if", "app"]
        if depth <= 2 or self.rng.random() < 0.3:
            forms.append("return")
        if self.ops and not self.pure:
            forms += ["op", "op"]
        if self.handlers:
            forms += ["handle", "handle"]
        if ty == INT:
            forms.append("add")
        if not self.dyn:
            forms.append("poly")
        if self.dyn:
            forms += ["deref", "assign", "dlet", "dlet"]
        form = self.rng.choice(forms)
        d = depth - 1
        match form:
            case "return":
                return s.Return(self.value(ty, depth, env))
            case "do":
                t1 = self.gtype()
                x = self.name("x")
                return s.Do(x, self.comp(t1, d, env), self.comp(ty, d, env + [(x, t1, False)]))
            case "if":
                return s.If(self.value(BOOL, d, env), self.comp(ty, d, env), self.comp(ty, d, env))
            case "app":
                a = self.gtype(arrows=False)
                fs = [x for x, t, _ in env if isinstance(t, TArrow) and t.cod.carrier == ty]
                if fs and self.rng.random() < 0.5:
                    f = self.rng.choice(fs)
                    dom = next(t.dom for x, t, _ in reversed(env) if x == f)
                    return s.App(s.Var(f), self.value(dom, d, env))
                return s.App(self.value(arrow(a, ty), depth, env), self.value(a, d, env))
            case "op":
                op = self.rng.choice(sorted(self.ops))
                pa, pb = self.ops[op]
                y = self.name("y")
                return s.OpCall(op, self.value(pa, d, env), y, self.comp(ty, d, env + [(y, pb, False)]))
            case "handle":
                return self.handle(ty, d, env)
            case "add":
                if self.dyn and self.rng.random() < 0.5:
                    # read a parameter into the sum
                    x = self.name("x")
                    return s.Do(x, s.Deref("p"), s.PrimAdd(s.Var(x), self.value(INT, d, env)))
                return s.PrimAdd(self.value(INT, d, env), self.value(INT, d, env))
            case "poly":
                f = self.name("id")
                x = self.name("x")
                return s.Do(f, s.Return(s.Lam(x, s.Return(s.Var(x)))),
                            self.comp(ty, d, env + [(f, None, True)]))
            case "deref":
                p = self.rng.choice(sorted(self.params))
                x = self.name("x")
                return s.Do(x, s.Deref(p), self.comp(ty, d, env + [(x, self.params[p], False)]))
            case "assign":
                p = self.rng.choice(sorted(self.params))
                x = self.name("_")
                return s.Do(x, s.Assign(p, self.value(self.params[p], d, env)), self.comp(ty, d, env))
            case "dlet":
                p = self.rng.choice(sorted(self.params))
                return s.DLet(p, self.value(self.params[p], d, env), self.comp(ty, d, env))
        raise AssertionError(form)

    def handle(self, ty, depth: int, env: list, at_least: int = 0):
        a = self.gtype(arrows=False)
        body = self.comp(a, depth, env)
        xr = self.name("x")
        # the outermost handler's clauses perform no operations of their own,
        # so that most runs end in a value rather than an unhandled call
        outer, self.pure = self.pure, self.pure or at_least > 0
        ret = self.comp(ty, max(1, depth - 1), env + [(xr, a, False)])
        hi = len(self.ops) if at_least else min(3, len(self.ops))
        n = self.rng.randint(min(at_least, hi), hi)
        clauses = []
        for op in self.rng.sample(sorted(self.ops), n):
            pa, pb = self.ops[op]
            x, k = self.name("x"), self.name("k")
            cenv = env + [(x, pa, False), (k, arrow(pb, ty), False)]
            if self.rng.random() < 0.6:
                cbody = s.App(s.Var(k), self.value(pb, depth - 1, cenv))
            else:
                cbody = self.comp(ty, depth - 1, cenv)
            annot = pa.name if pa == UNIT else None
            clauses.append(s.OpClause(op, x, k, cbody, annot))
        self.pure = outer
        h = s.HandlerVal(s.Handler(xr, ret, tuple(clauses)))
        if self.rng.random() < 0.2:
            v = self.name("h")
            return s.Do(v, s.Return(h), s.Handle(s.Var(v), body))
        return s.Handle(h, body)

    def program(self):
        ty = self.rng.choice(_BASE)
        if self.handlers and self.rng.random() < 0.7:
            c = self.handle(ty, self.cfg.max_depth, [], at_least=len(self.ops))
        else:
            c = self.comp(ty, self.cfg.max_depth, [])
        if self.dyn:
            # bind every parameter at the top so that no read or write is unbound
            for p in sorted(self.params, reverse=True):
                c = s.DLet(p, self.value(self.params[p], 1, []), c)
        return c


def gen_well_typed(cfg: GenConfig, attempts: int = 50):
    """A random term that type-checks in ``cfg.mode``; deterministic in the seed."""
    for i in range(attempts):
        sub = GenConfig(cfg.seed * 1000 + i, cfg.max_depth, cfg.mode, cfg.op_budget,
                        cfg.param_budget)
        g = _Gen(sub)
        c = g.program()
        try:
            _typing_for(cfg.mode, c, g)
        except TypeCheckError:
            continue
        return c
    raise RuntimeError(f"no well-typed program found for seed {cfg.seed}")


def generation_context(cfg: GenConfig) -> dict:
    """The global signature or parameter signature the generator assumes."""
    g = _Gen(cfg)
    if cfg.mode == "dyn":
        return dict(g.params)
    return dict(g.ops)


def _typing_for(mode: str, c, g: _Gen):
    match mode:
        case "dyn":
            return dyn_check(g.params, c)
        case "stateful":
            return infer_closed(c, "local")
        case "local":
            return infer_closed(c, "local")
        case _:
            return infer_closed(c, mode, g.ops)


# ---------------------------------------------------------------------------
# Safety


def check_safety(c, mode: str = "local", global_sig: Optional[dict] = None,
                 fuel: int = DEFAULT_FUEL, theorem: str = "safety", stepper=step) -> Verdict:
    """Run ``c`` and re-check its type and signature after every step."""
    try:
        typing = infer_closed(c, mode, global_sig)
    except TypeCheckError as exc:
        return Verdict(theorem, False, {"step": 0, "term": pretty(c), "error": str(exc)},
                       note="ill-typed input")
    ty = typing.type
    sig = _closed_sig(typing.effects, mode, global_sig)
    for n in range(1, fuel + 1):
        r = stepper(c)
        match r:
            case Stepped(c2):
                try:
                    check_against(c2, ty, sig, mode, global_sig)
                except TypeCheckError as exc:
                    return Verdict(theorem, False, {"step": n, "term": pretty(c2),
                                                    "error": str(exc)}, n)
                c = c2
            case Terminal():
                return Verdict(theorem, True, steps=n - 1)
            case TerminalOp(op_c):
                problem = _check_unhandled(op_c, ty, sig, mode, global_sig)
                if problem:
                    return Verdict(theorem, False, {"step": n, "term": pretty(op_c),
                                                    "error": problem}, n)
                return Verdict(theorem, True, steps=n - 1, note=f"unhandled {op_c.op}")
            case Stuck(reason):
                return Verdict(theorem, False, {"step": n, "term": pretty(c), "error": reason}, n)
    return Verdict(theorem, False, {"step": fuel, "error": "fuel exhausted"}, fuel)


def _closed_sig(effects, mode, global_sig):
    if mode == "none":
        return None
    if effects is None:
        return Sig()
    return Sig(effects.entries, True)


def _check_unhandled(c: s.OpCall, ty, sig, mode, global_sig) -> Optional[str]:
    if mode == "none":
        if c.op not in (global_sig or {}):
            return f"operation {c.op} is not declared"
        return None
    if c.op not in sig.ops:
        return f"operation {c.op} escapes the signature {sorted(sig.ops)}"
    if mode == "local":
        pa, pb = sig.lookup(c.op)
        try:
            check_against(s.Return(c.arg), pa, Sig(), mode, global_sig)
            check_against(s.Return(s.Lam(c.var, c.cont)), TArrow(pb, CType(ty, sig)), Sig(),
                          mode, global_sig)
        except TypeCheckError as exc:
            return f"unhandled {c.op} at the wrong type: {exc}"
    return None


# ---------------------------------------------------------------------------
# Global state


def global_state_oracle_step(c, state):
    """One step of ordinary global-state semantics; ``None`` on ``return``."""
    match c:
        case s.Return():
            return None
        case s.OpCall("get", _, y, k):
            return s.substitute(k, state, y), state
        case s.OpCall("set", v, y, k):
            return s.substitute(k, s.UNIT, y), v
        case s.OpCall(op):
            raise ValueError(f"operation {op} is not a state operation")
        case s.Do(x, c1, c2) if not isinstance(c1, s.Return):
            r = global_state_oracle_step(c1, state)
            if r is None:
                return None
            return s.Do(x, r[0], c2), r[1]
    r = step(c)
    if not isinstance(r, Stepped):
        raise ValueError(f"pure step failed: {r}")
    return r.comp, state


def _search(start, target, stepper=step, bound: int = SEARCH_BOUND):
    """Number of steps (≥ 1) from ``start`` to a term alpha-equal to ``target``."""
    goal = canonical_key(target)
    c = start
    for n in range(1, bound + 1):
        r = stepper(c)
        if not isinstance(r, Stepped):
            return None, c
        c = r.comp
        if canonical_key(c) == goal:
            return n, c
    return None, c


def check_global_state_sim(c, state, fuel: int = 1000, bound: int = SEARCH_BOUND,
                           theorem: str = "global-state", stepper=step) -> Verdict:
    steps = 0
    for i in range(fuel):
        r = global_state_oracle_step(c, state)
        if r is None:
            return Verdict(theorem, True, steps=steps, note=f"oracle steps={i}")
        c2, state2 = r
        n, reached = _search(statesim(c, state), statesim(c2, state2), stepper, bound)
        if n is None:
            return Verdict(theorem, False, {"oracle_step": i, "from": pretty(c),
                                            "to": pretty(c2), "bound": bound}, steps)
        steps += n
        c, state = c2, state2
    return Verdict(theorem, False, {"error": "oracle fuel exhausted"}, steps)


# ---------------------------------------------------------------------------
# Dynamic scope


def check_dyn_simulation(c, fuel: int = 1000, bound: int = SEARCH_BOUND,
                         theorem: str = "dyn-simulation", stepper=step) -> Verdict:
    steps = 0
    tc = translate_term(c)
    for i in range(fuel):
        r = dyn_step(c)
        if isinstance(r, Terminal):
            return Verdict(theorem, True, steps=steps, note=f"dyn steps={i}")
        if not isinstance(r, Stepped):
            return Verdict(theorem, False, {"dyn_step": i, "term": pretty(c),
                                            "error": r.describe()}, steps)
        c2 = r.comp
        target = translate_term(c2)
        n, reached = _search(tc, target, stepper, bound)
        if n is None:
            return Verdict(theorem, False, {"dyn_step": i, "from": pretty(c), "to": pretty(c2),
                                            "bound": bound}, steps)
        steps += n
        c, tc = c2, reached
    return Verdict(theorem, False, {"error": "dyn fuel exhausted"}, steps)


def check_type_preservation(c, params: dict, mode: str, theorem: Optional[str] = None) -> Verdict:
    """The translation of ``c`` checks at the translated type and signature."""
    theorem = theorem or f"type-preservation/{mode}"
    try:
        typing = dyn_check(params, c)
    except TypeCheckError as exc:
        return Verdict(theorem, False, {"term": pretty(c), "error": str(exc)}, note="ill-typed input")
    try:
        ty = translate_type(mode, typing.type, params)
        sig = signature_of(mode, params)
    except NonGroundSignature as exc:
        return Verdict(theorem, False, {"error": str(exc)}, note="non-ground signature")
    tc = translate_term(c)
    try:
        if mode == GROUND:
            check_against(tc, ty, sig, "local")
        else:
            check_against(tc, ty, sig, "coarse", translate_signature(COARSE, params))
    except TypeCheckError as exc:
        return Verdict(theorem, False, {"term": pretty(tc), "error": str(exc)})
    return Verdict(theorem, True)


# ---------------------------------------------------------------------------
# Campaigns


THEOREMS = ("safety", "global-state", "dyn-simulation", "type-preservation")


@dataclass
class FuzzReport:
    theorem: str
    mode: str
    results: list = field(default_factory=list)   # [(seed, Verdict)]

    @property
    def passed(self) -> int:
        return sum(1 for _, v in self.results if v.passed)

    @property
    def failed(self) -> list:
        return [(seed, v) for seed, v in self.results if not v.passed]

    def lines(self) -> list[str]:
        return [f"seed {seed:>5}  {v.line()}" for seed, v in self.results]

    def summary(self) -> dict:
        return {"theorem": self.theorem, "mode": self.mode, "runs": len(self.results),
                "passed": self.passed, "failed": len(self.results) - self.passed}


def fuzz(theorem: str, seeds: int = 100, depth: int = 6, mode: str = "local",
         start: int = 0) -> FuzzReport:
    """Generate ``seeds`` programs and check ``theorem`` on each."""
    report = FuzzReport(theorem, mode)
    for seed in range(start, start + seeds):
        report.results.append((seed, run_one(theorem, seed, depth, mode)))
    return report


def run_one(theorem: str, seed: int, depth: int = 6, mode: str = "local") -> Verdict:
    match theorem:
        case "safety":
            cfg = GenConfig(seed, depth, mode)
            c = gen_well_typed(cfg)
            gsig = None if mode == "local" else generation_context(cfg)
            return check_safety(c, mode, gsig)
        case "global-state":
            c = gen_well_typed(GenConfig(seed, depth, "stateful"))
            return check_global_state_sim(c, s.IntLit(seed % 4))
        case "dyn-simulation":
            c = gen_well_typed(GenConfig(seed, depth, "dyn"))
            return check_dyn_simulation(c)
        case "type-preservation":
            cfg = GenConfig(seed, depth, "dyn")
            c = gen_well_typed(cfg)
            params = generation_context(cfg)
            g = check_type_preservation(c, params, GROUND)
            if not g.passed:
                return g
            k = check_type_preservation(c, params, COARSE)
            return k if not k.passed else Verdict("type-preservation", True,
                                                  note="ground+coarse")
    raise ValueError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")


__all__ = ["Verdict", "GenConfig", "gen_well_typed", "generation_context", "check_safety",
           "global_state_oracle_step", "check_global_state_sim", "check_dyn_simulation",
           "check_type_preservation", "fuzz", "run_one", "FuzzReport", "THEOREMS",
           "PALETTE", "PARAMS", "SEARCH_BOUND"]
