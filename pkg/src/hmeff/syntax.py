"""Abstract syntax for the handler calculus and the dynamic-scope calculus.

Terms are immutable dataclasses.  Values and computations are kept apart
(fine-grained call-by-value); the three dynamic-scope forms ``Deref``,
``Assign`` and ``DLet`` share the computation type so both calculi reuse
the same substitution and alpha-equivalence code.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Optional, Union

# ---------------------------------------------------------------------------
# Fresh names

_counter = itertools.count(1)
_lock = threading.Lock()


def fresh(base: str = "x") -> str:
    """Return a variable name that no parser-produced name can clash with."""
    base = base.split("'")[0] or "x"
    with _lock:
        n = next(_counter)
    return f"{base}'{n}"


def is_dummy(name: str) -> bool:
    return name.startswith("_")


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Lam:
    param: str
    body: "Computation"


@dataclass(frozen=True)
class OpClause:
    op: str
    param: str
    kont: str
    body: "Computation"
    # Optional base-type ascription on the parameter (``get(_ : unit; k)``).
    annot: Optional[str] = None


@dataclass(frozen=True)
class Handler:
    ret_var: str
    ret_body: "Computation"
    clauses: tuple[OpClause, ...] = ()

    def __post_init__(self):
        ops = [cl.op for cl in self.clauses]
        if len(ops) != len(set(ops)):
            raise ValueError(f"duplicate operation clause in handler: {ops}")

    def clause(self, op: str) -> Optional[OpClause]:
        for cl in self.clauses:
            if cl.op == op:
                return cl
        return None

    @property
    def ops(self) -> frozenset[str]:
        return frozenset(cl.op for cl in self.clauses)


@dataclass(frozen=True)
class HandlerVal:
    handler: Handler


TRUE = Bool(True)
FALSE = Bool(False)
UNIT = Unit()

Value = Union[Var, Bool, Unit, IntLit, Lam, HandlerVal]

# ---------------------------------------------------------------------------
# Computations


@dataclass(frozen=True)
class Return:
    value: Value


@dataclass(frozen=True)
class Do:
    var: str
    first: "Computation"
    rest: "Computation"


@dataclass(frozen=True)
class If:
    cond: Value
    then: "Computation"
    orelse: "Computation"


@dataclass(frozen=True)
class App:
    fn: Value
    arg: Value


@dataclass(frozen=True)
class OpCall:
    op: str
    arg: Value
    var: str
    cont: "Computation"


@dataclass(frozen=True)
class Handle:
    handler: Value
    body: "Computation"


@dataclass(frozen=True)
class PrimAdd:
    left: Value
    right: Value


@dataclass(frozen=True)
class Deref:
    param: str


@dataclass(frozen=True)
class Assign:
    param: str
    value: Value


@dataclass(frozen=True)
class DLet:
    param: str
    value: Value
    body: "Computation"


Computation = Union[Return, Do, If, App, OpCall, Handle, PrimAdd, Deref, Assign, DLet]
Term = Union[Value, Computation, Handler]

VALUE_TYPES = (Var, Bool, Unit, IntLit, Lam, HandlerVal)
COMPUTATION_TYPES = (Return, Do, If, App, OpCall, Handle, PrimAdd, Deref, Assign, DLet)
DYN_FORMS = (Deref, Assign, DLet)


def is_value(t) -> bool:
    return isinstance(t, VALUE_TYPES)


def is_computation(t) -> bool:
    return isinstance(t, COMPUTATION_TYPES)


def generic_effect(op: str) -> Lam:
    """The generic effect of ``op``: ``fun x -> op(x; y. return y)``."""
    x, y = fresh("x"), fresh("y")
    return Lam(x, OpCall(op, Var(x), y, Return(Var(y))))


def op_call(op: str, arg: Value) -> OpCall:
    """``op v`` applied directly, without the intermediate beta step."""
    y = fresh("y")
    return OpCall(op, arg, y, Return(Var(y)))


# ---------------------------------------------------------------------------
# Free variables and parameters


def free_vars(t) -> frozenset[str]:
    match t:
        case Var(x):
            return frozenset([x])
        case Bool() | Unit() | IntLit() | Deref():
            return frozenset()
        case Lam(x, body):
            return free_vars(body) - {x}
        case HandlerVal(h):
            return free_vars(h)
        case Handler(xr, cr, clauses):
            out = free_vars(cr) - {xr}
            for cl in clauses:
                out |= free_vars(cl.body) - {cl.param, cl.kont}
            return out
        case Return(v):
            return free_vars(v)
        case Do(x, c1, c2):
            return free_vars(c1) | (free_vars(c2) - {x})
        case If(v, c1, c2):
            return free_vars(v) | free_vars(c1) | free_vars(c2)
        case App(v1, v2) | PrimAdd(v1, v2):
            return free_vars(v1) | free_vars(v2)
        case OpCall(_, v, y, c):
            return free_vars(v) | (free_vars(c) - {y})
        case Handle(h, c):
            return free_vars(h) | free_vars(c)
        case Assign(_, v):
            return free_vars(v)
        case DLet(_, v, c):
            return free_vars(v) | free_vars(c)
    raise TypeError(f"not a term: {t!r}")


def free_params(t) -> frozenset[str]:
    """Parameters not bound by an enclosing ``dlet``."""
    match t:
        case Var() | Bool() | Unit() | IntLit():
            return frozenset()
        case Deref(p):
            return frozenset([p])
        case Assign(p, v):
            return frozenset([p]) | free_params(v)
        case DLet(p, v, c):
            return free_params(v) | (free_params(c) - {p})
        case _:
            return frozenset().union(*(free_params(s) for s in _children(t)))


def _children(t):
    match t:
        case Lam(_, b):
            return (b,)
        case HandlerVal(h):
            return (h,)
        case Handler(_, cr, clauses):
            return (cr, *(cl.body for cl in clauses))
        case Return(v):
            return (v,)
        case Do(_, c1, c2):
            return (c1, c2)
        case If(v, c1, c2):
            return (v, c1, c2)
        case App(v1, v2) | PrimAdd(v1, v2):
            return (v1, v2)
        case OpCall(_, v, _, c):
            return (v, c)
        case Handle(h, c):
            return (h, c)
    return ()


def operations(t) -> frozenset[str]:
    """Every operation symbol mentioned in a term (calls and clauses)."""
    match t:
        case OpCall(op, v, _, c):
            return frozenset([op]) | operations(v) | operations(c)
        case Handler(_, cr, clauses):
            out = operations(cr)
            for cl in clauses:
                out |= {cl.op} | operations(cl.body)
            return out
        case DLet(_, v, c):
            return operations(v) | operations(c)
        case Assign(_, v):
            return operations(v)
    return frozenset().union(*(operations(s) for s in _children(t)))


def term_size(t) -> int:
    match t:
        case DLet(_, v, c):
            return 1 + term_size(v) + term_size(c)
        case Assign(_, v):
            return 1 + term_size(v)
    return 1 + sum(term_size(s) for s in _children(t))


# ---------------------------------------------------------------------------
# Substitution


def rename(c, old: str, new: str):
    return substitute(c, Var(new), old)


def substitute(t, v: Value, x: str):
    """Capture-avoiding ``t[v/x]``; works on values, computations and handlers."""
    return _subst(t, v, x, free_vars(v))


def _binder(y: str, body, v, x, fv):
    """Push the substitution under a binder for ``y``, renaming it if needed."""
    if y == x:
        return y, body
    if y in fv:
        y2 = fresh(y)
        body = _subst(body, Var(y2), y, frozenset([y2]))
        y = y2
    return y, _subst(body, v, x, fv)


def _binder2(a: str, b: str, body, v, x, fv):
    if x in (a, b):
        return a, b, body
    if a in fv:
        a2 = fresh(a)
        body = _subst(body, Var(a2), a, frozenset([a2]))
        a = a2
    if b in fv:
        b2 = fresh(b)
        body = _subst(body, Var(b2), b, frozenset([b2]))
        b = b2
    return a, b, _subst(body, v, x, fv)


def _subst(t, v, x, fv):
    if x not in free_vars(t):
        return t
    match t:
        case Var(y):
            return v if y == x else t
        case Lam(y, body):
            y, body = _binder(y, body, v, x, fv)
            return Lam(y, body)
        case HandlerVal(h):
            return HandlerVal(_subst(h, v, x, fv))
        case Handler(xr, cr, clauses):
            xr, cr = _binder(xr, cr, v, x, fv)
            new = []
            for cl in clauses:
                a, k, body = _binder2(cl.param, cl.kont, cl.body, v, x, fv)
                new.append(OpClause(cl.op, a, k, body, cl.annot))
            return Handler(xr, cr, tuple(new))
        case Return(w):
            return Return(_subst(w, v, x, fv))
        case Do(y, c1, c2):
            c1 = _subst(c1, v, x, fv)
            y, c2 = _binder(y, c2, v, x, fv)
            return Do(y, c1, c2)
        case If(w, c1, c2):
            return If(_subst(w, v, x, fv), _subst(c1, v, x, fv), _subst(c2, v, x, fv))
        case App(v1, v2):
            return App(_subst(v1, v, x, fv), _subst(v2, v, x, fv))
        case PrimAdd(v1, v2):
            return PrimAdd(_subst(v1, v, x, fv), _subst(v2, v, x, fv))
        case OpCall(op, w, y, c):
            w = _subst(w, v, x, fv)
            y, c = _binder(y, c, v, x, fv)
            return OpCall(op, w, y, c)
        case Handle(h, c):
            return Handle(_subst(h, v, x, fv), _subst(c, v, x, fv))
        case Assign(p, w):
            return Assign(p, _subst(w, v, x, fv))
        case DLet(p, w, c):
            return DLet(p, _subst(w, v, x, fv), _subst(c, v, x, fv))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Alpha-equivalence


def alpha_eq(a, b) -> bool:
    """Alpha-equivalence; bound variables are compared by binding depth.

    Parameters and operations are compared by name: ``dlet`` binds
    dynamically and is not subject to renaming.  Handler clauses are
    compared as a map keyed by operation.
    """
    return _aeq(a, b, {}, {}, 0)


def _aeq(a, b, ea: dict, eb: dict, depth: int) -> bool:
    def bind(names_a, names_b):
        na, nb = dict(ea), dict(eb)
        d = depth
        for x, y in zip(names_a, names_b):
            na[x] = d
            nb[y] = d
            d += 1
        return na, nb, d

    match a, b:
        case Var(x), Var(y):
            if x in ea or y in eb:
                return ea.get(x) == eb.get(y) and x in ea and y in eb
            return x == y
        case (Bool() | Unit() | IntLit() | Deref()), _:
            return a == b
        case Lam(x, c), Lam(y, d):
            na, nb, dd = bind([x], [y])
            return _aeq(c, d, na, nb, dd)
        case HandlerVal(h), HandlerVal(g):
            return _aeq(h, g, ea, eb, depth)
        case Handler(), Handler():
            if a.ops != b.ops:
                return False
            na, nb, dd = bind([a.ret_var], [b.ret_var])
            if not _aeq(a.ret_body, b.ret_body, na, nb, dd):
                return False
            for cl in a.clauses:
                other = b.clause(cl.op)
                if cl.annot != other.annot:
                    return False
                na, nb, dd = bind([cl.param, cl.kont], [other.param, other.kont])
                if not _aeq(cl.body, other.body, na, nb, dd):
                    return False
            return True
        case Return(v), Return(w):
            return _aeq(v, w, ea, eb, depth)
        case Do(x, c1, c2), Do(y, d1, d2):
            if not _aeq(c1, d1, ea, eb, depth):
                return False
            na, nb, dd = bind([x], [y])
            return _aeq(c2, d2, na, nb, dd)
        case If(v, c1, c2), If(w, d1, d2):
            return (_aeq(v, w, ea, eb, depth) and _aeq(c1, d1, ea, eb, depth)
                    and _aeq(c2, d2, ea, eb, depth))
        case (App(v1, v2), App(w1, w2)) | (PrimAdd(v1, v2), PrimAdd(w1, w2)):
            return _aeq(v1, w1, ea, eb, depth) and _aeq(v2, w2, ea, eb, depth)
        case OpCall(op1, v, x, c), OpCall(op2, w, y, d):
            if op1 != op2 or not _aeq(v, w, ea, eb, depth):
                return False
            na, nb, dd = bind([x], [y])
            return _aeq(c, d, na, nb, dd)
        case Handle(h, c), Handle(g, d):
            return _aeq(h, g, ea, eb, depth) and _aeq(c, d, ea, eb, depth)
        case Assign(p, v), Assign(q, w):
            return p == q and _aeq(v, w, ea, eb, depth)
        case DLet(p, v, c), DLet(q, w, d):
            return p == q and _aeq(v, w, ea, eb, depth) and _aeq(c, d, ea, eb, depth)
    return False
