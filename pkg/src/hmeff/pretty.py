"""Pretty-printing of core terms back into the concrete syntax.

Output re-parses to an alpha-equivalent term (for closed terms; a free
variable would be read back as an operation).  Parentheses are inserted
only where the grammar needs them.
"""
from __future__ import annotations

from . import syntax as s
from .types import show_type

# precedence levels
SEQ, STMT, ADD, APP, ATOM = range(5)


def pretty(t) -> str:
    if s.is_value(t):
        return _value(t, STMT)
    if isinstance(t, s.Handler):
        return _handler(t)
    return _comp(t, SEQ)


def _paren(text: str, level: int, need: int) -> str:
    return f"({text})" if level < need else text


def _value(v, need: int) -> str:
    match v:
        case s.Var(x):
            return x
        case s.Bool(b):
            return "true" if b else "false"
        case s.Unit():
            return "()"
        case s.IntLit(n):
            return str(n) if n >= 0 else f"({n})"
        case s.Lam():
            # fun x y -> c abbreviates fun x -> return (fun y -> c)
            params = [v.param]
            body = v.body
            while isinstance(body, s.Return) and isinstance(body.value, s.Lam):
                params.append(body.value.param)
                body = body.value.body
            return _paren(f"fun {' '.join(params)} -> {_comp(body, SEQ)}", STMT, need)
        case s.HandlerVal(h):
            return _handler(h)
    raise TypeError(f"not a value: {v!r}")


def _handler(h: s.Handler) -> str:
    parts = [f"return {h.ret_var} -> {_comp(h.ret_body, SEQ)}"]
    for cl in h.clauses:
        x = cl.param if cl.annot is None else f"{cl.param} : {cl.annot}"
        parts.append(f"{cl.op}({x}; {cl.kont}) -> {_comp(cl.body, SEQ)}")
    return "handler { " + " | ".join(parts) + " }"


def _comp(c, need: int) -> str:
    match c:
        case s.Return(v):
            return _paren(f"return {_value(v, APP)}", ADD, need)
        case s.Do(x, c1, c2):
            if s.is_dummy(x) and x not in s.free_vars(c2):
                text = f"{_comp(c1, ADD)}; {_comp(c2, SEQ)}"
                return _paren(text, SEQ, need)
            text = f"do {x} <- {_comp(c1, SEQ)} in {_comp(c2, SEQ)}"
            return _paren(text, STMT, need)
        case s.If(v, c1, c2):
            text = f"if {_value(v, APP)} then {_comp(c1, SEQ)} else {_comp(c2, STMT)}"
            return _paren(text, STMT, need)
        case s.App(v1, v2):
            return _paren(f"{_value(v1, APP)} {_value(v2, ATOM)}", APP, need)
        case s.OpCall(op, v, y, k):
            return f"{op}({_value(v, ADD)}; {y}. {_comp(k, SEQ)})"
        case s.Handle(h, body):
            return _paren(f"with {_value(h, APP)} handle {_comp(body, SEQ)}", STMT, need)
        case s.PrimAdd(v1, v2):
            return _paren(f"{_value(v1, APP)} + {_value(v2, APP)}", ADD, need)
        case s.Deref(p):
            return f"!${p}"
        case s.Assign(p, v):
            return _paren(f"${p} := {_value(v, APP)}", ADD, need)
        case s.DLet(p, v, body):
            return _paren(f"dlet ${p} = {_value(v, APP)} in {_comp(body, SEQ)}", STMT, need)
    raise TypeError(f"not a computation: {c!r}")


def pretty_program(body, mode: str = "local", global_sig=None, params=None) -> str:
    """Render a full ``.eff`` file, header included."""
    lines = []
    if params is None:
        lines.append(f"mode {mode};")
    if global_sig:
        entries = "; ".join(f"{op} : {_type(a)} -> {_type(b)}" for op, (a, b) in
                            sorted(global_sig.items()))
        lines.append(f"signature {{ {entries} }}")
    if params is not None:
        entries = "; ".join(f"${p} : {_type(a)}" for p, a in sorted(params.items()))
        lines.append(f"params {{ {entries} }}")
    lines.append(pretty(body))
    return "\n".join(lines) + "\n"


def _type(t) -> str:
    """Types in header syntax (ASCII arrows, parenthesised arrow operands)."""
    text = show_type(t, "local", 1)
    return text.replace("→", "->").replace("⇒", "=>")


def format_trace(trace, limit: int | None = None) -> str:
    """One pretty-printed computation per line, prefixed by its step index."""
    lines = []
    for i, c in trace.numbered():
        if c is None:
            lines.append(f"{i:>5}  ...")
            continue
        lines.append(f"{i:>5}  {pretty(c)}")
        if limit is not None and len(lines) >= limit:
            break
    lines.append(f"=> {trace.outcome.describe()}")
    return "\n".join(lines)


__all__ = ["pretty", "pretty_program", "format_trace"]
