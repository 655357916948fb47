"""Small-step operational semantics of the handler calculus.

``step`` is a function on closed computations.  Operation calls propagate
outwards one frame at a time: through ``do`` by moving the rest of the
sequence into the continuation, and through a handler without a matching
clause by wrapping the continuation in that handler (forwarding).  A
handler with a matching clause runs the clause with the continuation
re-wrapped in the same handler (deep handling).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax as s

DEFAULT_FUEL = 10_000
TRACE_CAP = 1_000


# ---------------------------------------------------------------------------
# Step results


@dataclass(frozen=True)
class Stepped:
    comp: s.Computation


@dataclass(frozen=True)
class Terminal:
    comp: s.Return

    def describe(self) -> str:
        from .pretty import pretty
        return pretty(self.comp)


@dataclass(frozen=True)
class TerminalOp:
    comp: s.OpCall

    def describe(self) -> str:
        from .pretty import pretty
        return f"unhandled operation {self.comp.op}: {pretty(self.comp)}"


@dataclass(frozen=True)
class Stuck:
    reason: str
    comp: object = None

    def describe(self) -> str:
        return f"stuck: {self.reason}"


@dataclass(frozen=True)
class FuelExhausted:
    last: s.Computation
    repeated_at: Optional[tuple[int, int]] = None   # (first index, second index)

    def describe(self) -> str:
        text = "fuel exhausted"
        if self.repeated_at is not None:
            i, j = self.repeated_at
            text += f" (state {j} repeats state {i}: cycle of length {j - i})"
        return text


StepResult = Union[Stepped, Terminal, TerminalOp, Stuck]
Outcome = Union[Terminal, TerminalOp, Stuck, FuelExhausted]


# ---------------------------------------------------------------------------
# One step


def step(c: s.Computation) -> StepResult:
    match c:
        case s.Return():
            return Terminal(c)
        case s.OpCall():
            return TerminalOp(c)
        case s.Do(x, c1, c2):
            match c1:
                case s.Return(v):
                    return Stepped(s.substitute(c2, v, x))
                case s.OpCall(op, v, y, k):
                    y2, k2 = _fresh_for(y, k, s.free_vars(c2) | {x})
                    return Stepped(s.OpCall(op, v, y2, s.Do(x, k2, c2)))
            r = step(c1)
            if isinstance(r, Stepped):
                return Stepped(s.Do(x, r.comp, c2))
            return r
        case s.If(s.Bool(b), c1, c2):
            return Stepped(c1 if b else c2)
        case s.If(v, _, _):
            return Stuck(f"conditional on a non-boolean {type(v).__name__}", c)
        case s.App(s.Lam(x, body), v):
            return Stepped(s.substitute(body, v, x))
        case s.App(f, _):
            return Stuck(f"application of a non-function {type(f).__name__}", c)
        case s.PrimAdd(s.IntLit(a), s.IntLit(b)):
            return Stepped(s.Return(s.IntLit(a + b)))
        case s.PrimAdd():
            return Stuck("addition of non-integers", c)
        case s.Handle(s.HandlerVal(h) as hv, body):
            match body:
                case s.Return(v):
                    return Stepped(s.substitute(h.ret_body, v, h.ret_var))
                case s.OpCall(op, v, y, k):
                    cl = h.clause(op)
                    if cl is None:
                        # forwarding; the handler is closed so y cannot be captured
                        return Stepped(s.OpCall(op, v, y, s.Handle(hv, k)))
                    resume = s.Lam(y, s.Handle(hv, k))
                    out = _subst2(cl.body, cl.param, v, cl.kont, resume)
                    return Stepped(out)
            r = step(body)
            if isinstance(r, Stepped):
                return Stepped(s.Handle(hv, r.comp))
            return r
        case s.Handle(h, _):
            return Stuck(f"handling with a non-handler {type(h).__name__}", c)
        case s.Deref() | s.Assign() | s.DLet():
            return Stuck("dynamic-scope form in the handler calculus", c)
    raise TypeError(f"not a computation: {c!r}")


def _fresh_for(y: str, body, avoid) -> tuple[str, s.Computation]:
    if y not in avoid:
        return y, body
    y2 = s.fresh(y)
    return y2, s.rename(body, y, y2)


def _subst2(body, x: str, v, k: str, kv):
    """Simultaneous substitution of the clause parameter and continuation."""
    if x == k:
        return s.substitute(body, kv, k)
    # rename k first so that substituting v cannot capture it
    k2 = s.fresh(k)
    body = s.rename(body, k, k2)
    body = s.substitute(body, v, x)
    return s.substitute(body, kv, k2)


# ---------------------------------------------------------------------------
# Runs and traces


@dataclass
class Trace:
    """The states visited by a run.

    ``steps`` keeps at most ``cap`` states: the first ``cap // 2`` and the
    most recent ones, with ``None`` marking the elided middle.
    """

    steps: list = field(default_factory=list)
    outcome: Outcome = None
    fuel_used: int = 0
    cap: int = TRACE_CAP
    _tail: deque = field(default_factory=deque, repr=False)
    _elided: int = 0

    def record(self, c) -> None:
        head = self.cap // 2
        if len(self.steps) < head:
            self.steps.append(c)
            return
        self._tail.append(c)
        if len(self._tail) > self.cap - head:
            self._tail.popleft()
            self._elided += 1

    def finish(self) -> None:
        if self._elided:
            self.steps.append(None)
        self.steps.extend(self._tail)
        self._tail.clear()

    def numbered(self):
        """(index, computation) pairs; ``None`` marks elided states."""
        i = 0
        for c in self.steps:
            if c is None:
                yield (-1, None)
                i += self._elided
                continue
            yield (i, c)
            i += 1

    @property
    def final(self):
        return self.steps[-1] if self.steps else None

    @property
    def result(self):
        return self.outcome


def run(c: s.Computation, fuel: int = DEFAULT_FUEL, stepper=step, detect_cycles: bool = False,
        cap: int = TRACE_CAP) -> Trace:
    """Iterate ``stepper`` until a terminal/stuck state or until fuel runs out.

    With ``detect_cycles`` the run also remembers every state (up to alpha
    renaming, via the printed form with canonical names) and reports the
    first repetition when fuel is exhausted.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    trace = Trace(cap=cap)
    trace.record(c)
    seen: dict = {}
    repeated = None
    if detect_cycles:
        seen[canonical_key(c)] = 0
    for n in range(1, fuel + 1):
        r = stepper(c)
        if not isinstance(r, Stepped):
            trace.outcome = r
            trace.fuel_used = n - 1
            trace.finish()
            return trace
        c = r.comp
        trace.record(c)
        if detect_cycles and repeated is None:
            key = canonical_key(c)
            if key in seen:
                repeated = (seen[key], n)
            else:
                seen[key] = n
    trace.outcome = FuelExhausted(c, repeated)
    trace.fuel_used = fuel
    trace.finish()
    return trace


def evaluate(c: s.Computation, fuel: int = DEFAULT_FUEL) -> Outcome:
    return run(c, fuel, cap=4).outcome


def canonical_key(t) -> str:
    """A string equal for exactly the alpha-equivalent terms."""
    return repr(_debruijn(t, {}, 0))


def _debruijn(t, env: dict, depth: int):
    def under(names, body):
        e = dict(env)
        d = depth
        for n in names:
            e[n] = d
            d += 1
        return _debruijn(body, e, d)

    match t:
        case s.Var(x):
            return ("bv", depth - env[x]) if x in env else ("fv", x)
        case s.Bool() | s.Unit() | s.IntLit() | s.Deref():
            return t
        case s.Lam(x, b):
            return ("lam", under([x], b))
        case s.HandlerVal(h):
            return ("hv", _debruijn(h, env, depth))
        case s.Handler(xr, cr, clauses):
            return ("h", under([xr], cr), tuple(sorted(
                (cl.op, cl.annot or "", under([cl.param, cl.kont], cl.body)) for cl in clauses)))
        case s.Return(v):
            return ("ret", _debruijn(v, env, depth))
        case s.Do(x, c1, c2):
            return ("do", _debruijn(c1, env, depth), under([x], c2))
        case s.If(v, c1, c2):
            return ("if", _debruijn(v, env, depth), _debruijn(c1, env, depth),
                    _debruijn(c2, env, depth))
        case s.App(a, b):
            return ("app", _debruijn(a, env, depth), _debruijn(b, env, depth))
        case s.PrimAdd(a, b):
            return ("add", _debruijn(a, env, depth), _debruijn(b, env, depth))
        case s.OpCall(op, v, y, k):
            return ("op", op, _debruijn(v, env, depth), under([y], k))
        case s.Handle(h, b):
            return ("with", _debruijn(h, env, depth), _debruijn(b, env, depth))
        case s.Assign(p, v):
            return ("set", p, _debruijn(v, env, depth))
        case s.DLet(p, v, b):
            return ("dlet", p, _debruijn(v, env, depth), _debruijn(b, env, depth))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# State simulation


def statesim(c: s.Computation, state: s.Value, handler: Optional[s.Value] = None) -> s.Computation:
    """``(with H_ST handle c) state``, elaborated to call-by-value form."""
    from .fixtures import fixture
    h = handler if handler is not None else fixture("H_ST")
    f = s.fresh("f")
    return s.Do(f, s.Handle(h, c), s.App(s.Var(f), state))


__all__ = ["step", "run", "evaluate", "statesim", "Trace", "Stepped", "Terminal",
           "TerminalOp", "Stuck", "FuelExhausted", "canonical_key", "DEFAULT_FUEL"]
