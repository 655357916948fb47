"""Dynamically scoped state: evaluation contexts, stepping and typing.

A computation is split into an evaluation context and a redex.  Contexts
are lists of frames, outermost first; ``do`` frames hold the rest of a
sequence and ``dlet`` frames hold the current value of a parameter.
Reading or writing ``$p`` acts on the innermost ``dlet`` frame for ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import syntax as s
from .eval import DEFAULT_FUEL, Stepped, Stuck, Terminal, Trace, run, step
from .infer import Typing, infer_closed, kind_check


@dataclass(frozen=True)
class DoFrame:
    var: str
    rest: s.Computation


@dataclass(frozen=True)
class DLetFrame:
    param: str
    value: s.Value


Frame = Union[DoFrame, DLetFrame]
EvalContext = tuple  # of Frame, outermost first


@dataclass(frozen=True)
class UnboundParameter(Stuck):
    param: str = ""

    def describe(self) -> str:
        return f"unbound parameter ${self.param}"


def bound_params(ctx: EvalContext) -> frozenset[str]:
    return frozenset(f.param for f in ctx if isinstance(f, DLetFrame))


def plug(ctx: EvalContext, c: s.Computation) -> s.Computation:
    for f in reversed(ctx):
        match f:
            case DoFrame(x, rest):
                c = s.Do(x, c, rest)
            case DLetFrame(p, v):
                c = s.DLet(p, v, c)
    return c


@dataclass(frozen=True)
class Decomposition:
    context: EvalContext
    redex: s.Computation
    binder: Optional[int] = None   # index in ``context`` of the dlet frame for the redex's parameter


def decompose(c: s.Computation) -> Optional[Decomposition]:
    """Split ``c`` into context and redex; ``None`` when ``c`` is ``return v``.

    Raises :class:`UnboundParameterError` if the redex reads or writes a
    parameter that no enclosing ``dlet`` binds.
    """
    frames: list[Frame] = []
    while True:
        match c:
            case s.Do(x, c1, c2) if not isinstance(c1, s.Return):
                frames.append(DoFrame(x, c2))
                c = c1
            case s.DLet(p, v, body) if not isinstance(body, s.Return):
                frames.append(DLetFrame(p, v))
                c = body
            case _:
                break
    if isinstance(c, s.Return) and not frames:
        return None
    binder = None
    if isinstance(c, (s.Deref, s.Assign)):
        for i in range(len(frames) - 1, -1, -1):
            f = frames[i]
            if isinstance(f, DLetFrame) and f.param == c.param:
                binder = i
                break
        else:
            raise UnboundParameterError(c.param)
    return Decomposition(tuple(frames), c, binder)


class UnboundParameterError(Exception):
    def __init__(self, param: str):
        self.param = param
        super().__init__(f"unbound parameter ${param}")


def dyn_step(c: s.Computation):
    try:
        d = decompose(c)
    except UnboundParameterError as exc:
        return UnboundParameter(f"unbound parameter ${exc.param}", c, exc.param)
    if d is None:
        return Terminal(c)
    ctx, r = list(d.context), d.redex
    match r:
        case s.Deref():
            value = ctx[d.binder].value
            return Stepped(plug(tuple(ctx), s.Return(value)))
        case s.Assign(p, v):
            ctx[d.binder] = DLetFrame(p, v)
            return Stepped(plug(tuple(ctx), s.Return(s.UNIT)))
        case s.DLet(_, _, s.Return() as ret):
            return Stepped(plug(tuple(ctx), ret))
        case s.OpCall() | s.Handle():
            return Stuck("handler form in the dynamic-scope calculus", c)
    res = step(r)
    if isinstance(res, Stepped):
        return Stepped(plug(tuple(ctx), res.comp))
    return res


def dyn_run(c: s.Computation, fuel: int = DEFAULT_FUEL, detect_cycles: bool = False) -> Trace:
    return run(c, fuel, stepper=dyn_step, detect_cycles=detect_cycles)


def dyn_check(params: dict, c: s.Computation, env=None) -> Typing:
    """Type ``c`` against the parameter signature ``params`` (no effects)."""
    for t in params.values():
        kind_check(frozenset(), t)
    if env is None:
        return infer_closed(c, "dyn", params=params)
    return infer_closed(c, "dyn", params=params, env=env)


__all__ = ["DoFrame", "DLetFrame", "Decomposition", "bound_params", "plug", "decompose",
           "dyn_step", "dyn_run", "dyn_check", "UnboundParameter", "UnboundParameterError"]
