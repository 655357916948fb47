"""Hindley-Milner inference for the handler calculus, without a value restriction.

Inference is Algorithm-W style.  Value-type unknowns are ``Meta``s; effect
signatures are *classes* (``SigVar`` handles) that only ever grow: calling
an operation adds it to the ambient class, unifying two computation types
merges their classes, and two kinds of inclusion constraint are solved to
a fixed point:

* the handled computation's signature is included in the handler's input
  signature, and
* the handler's input signature minus the handled operations is included
  in its output signature (handlers forward what they do not handle).

Generalisation at ``do`` quantifies the metas that are free neither in the
environment nor in the ambient signature; the latter restriction is what
replaces the value restriction.  Signature classes reachable only from the
generalised type are frozen into the scheme and re-created at every
instantiation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import syntax as s
from .types import (BASE_TYPES, BOOL, INT, UNIT, CType, Meta, Mismatch,
                    OccursCheck, ParamNotInSignature, Scheme, Sig, SigVar,
                    TArrow, TCon, THandler, TVar, TypeCheckError,
                    UnboundTypeVariable, UnboundVariable, UndeclaredOperation,
                    canonical, show_type)

# ---------------------------------------------------------------------------
# Environments


@dataclass(frozen=True)
class TypeEnv:
    """Θ (type variables), Ξ (polymorphic bindings) and Γ (monomorphic bindings)."""

    theta: frozenset = frozenset()
    xi: tuple = ()      # ((name, Scheme), ...)
    gamma: tuple = ()   # ((name, VType), ...)

    def lookup(self, x: str):
        for name, t in reversed(self.gamma):
            if name == x:
                return t
        for name, sch in reversed(self.xi):
            if name == x:
                return sch
        return None

    def bind_mono(self, x: str, t) -> "TypeEnv":
        return TypeEnv(self.theta, tuple(b for b in self.xi if b[0] != x),
                       tuple(b for b in self.gamma if b[0] != x) + ((x, t),))

    def bind_poly(self, x: str, sch: Scheme) -> "TypeEnv":
        # a scheme with no quantifiers may still hold frozen signatures that
        # are copied afresh at each use, so it stays in xi
        return TypeEnv(self.theta, tuple(b for b in self.xi if b[0] != x) + ((x, sch),),
                       tuple(b for b in self.gamma if b[0] != x))

    def types(self):
        yield from (t for _, t in self.gamma)
        yield from (sch for _, sch in self.xi)


EMPTY_ENV = TypeEnv()


# ---------------------------------------------------------------------------
# Kinding


def kind_check(theta, t) -> None:
    """Raise ``UnboundTypeVariable`` unless every type variable of ``t`` is in ``theta``."""
    theta = frozenset(theta)
    match t:
        case TVar(n):
            if n not in theta:
                raise UnboundTypeVariable(f"type variable {n} is not in scope")
        case TCon() | None:
            return
        case TArrow(a, c):
            kind_check(theta, a)
            kind_check(theta, c)
        case THandler(a, b, _):
            kind_check(theta, a)
            kind_check(theta, b)
        case CType(a, e):
            kind_check(theta, a)
            kind_check(theta, e)
        case Sig(entries):
            for _, a, b in entries:
                if a is not None:
                    kind_check(theta, a)
                    kind_check(theta, b)
        case Scheme(q, body):
            kind_check(theta | set(q), body)
        case dict():
            for v in t.values():
                kind_check(theta, v)
        case _:
            raise TypeError(f"cannot kind-check {t!r}")


def annotate_coarse(global_sig: dict) -> dict:
    """Give unannotated arrows in a coarse global signature the full operation set."""
    everything = Sig.names(global_sig)

    def fill(t):
        match t:
            case TArrow(a, CType(b, e)):
                return TArrow(fill(a), CType(fill(b), everything if e is None else e))
            case THandler(CType(a, e1), CType(b, e2), d):
                return THandler(CType(fill(a), everything if e1 is None else e1),
                                CType(fill(b), everything if e2 is None else e2), d)
        return t

    return {op: (fill(a), fill(b)) for op, (a, b) in global_sig.items()}


# ---------------------------------------------------------------------------
# Substitution / inference state


@dataclass
class DoRecord:
    name: str
    scheme: Scheme
    effects: SigVar
    quantified_metas: frozenset


class Substitution:
    """Meta bindings, signature classes and pending inclusion constraints.

    ``mode`` is one of ``local``, ``coarse``, ``none`` or ``dyn``.  Coarse
    and none modes read operation types from ``global_sig``; dyn mode reads
    parameter types from ``params`` and has no effects at all.
    """

    def __init__(self, mode: str = "local", global_sig: Optional[dict] = None,
                 params: Optional[dict] = None):
        if mode not in ("local", "coarse", "none", "dyn"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.global_sig = dict(global_sig or {})
        self.params = dict(params or {})
        self._ids = itertools.count()
        self.metas: dict[int, object] = {}
        self.parent: dict[int, int] = {}
        self.content: dict[int, dict] = {}
        self.closed: dict[int, bool] = {}
        self.constraints: list[tuple[SigVar, SigVar, frozenset]] = []
        self._done: set = set()
        self.records: list[DoRecord] = []
        self.universal = None
        if mode in ("none", "dyn"):
            self.universal = self.new_sig()
        if mode in ("coarse", "none"):
            for op, (a, b) in self.global_sig.items():
                kind_check(frozenset(), a)
                kind_check(frozenset(), b)
            if mode == "coarse":
                self.global_sig = annotate_coarse(self.global_sig)

    # -- fresh things -------------------------------------------------------

    def fresh(self) -> Meta:
        m = Meta(next(self._ids))
        self.metas[m.id] = None
        return m

    def new_sig(self, entries: Optional[dict] = None, closed: bool = False) -> SigVar:
        if self.universal is not None:
            return self.universal
        i = next(self._ids)
        self.parent[i] = i
        self.content[i] = dict(entries or {})
        self.closed[i] = closed
        return SigVar(i)

    # -- resolution ---------------------------------------------------------

    def find(self, e: SigVar) -> int:
        i = e.id
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def resolve(self, t):
        while isinstance(t, Meta) and self.metas.get(t.id) is not None:
            t = self.metas[t.id]
        return t

    def entries(self, e: SigVar) -> dict:
        return self.content[self.find(e)]

    # -- occurs -------------------------------------------------------------

    def _reach(self, t, metas: set, sigs: set, raw: bool = False):
        """Collect metas and signature roots reachable from ``t``."""
        stack = [t]
        while stack:
            x = stack.pop()
            if isinstance(x, Meta):
                b = self.metas.get(x.id)
                if b is None:
                    metas.add(x.id)
                else:
                    if raw:
                        metas.add(x.id)
                    stack.append(b)
            elif isinstance(x, TArrow):
                stack.append(x.dom)
                stack.append(x.cod)
            elif isinstance(x, THandler):
                stack.append(x.frm)
                stack.append(x.to)
            elif isinstance(x, CType):
                stack.append(x.carrier)
                if x.effects is not None:
                    stack.append(x.effects)
            elif isinstance(x, SigVar):
                r = self.find(x)
                if r not in sigs:
                    sigs.add(r)
                    for entry in self.content[r].values():
                        if entry is not None:
                            stack.extend(entry)
            elif isinstance(x, Scheme):
                stack.append(x.body)
            elif isinstance(x, Sig):
                for _, a, b in x.entries:
                    if a is not None:
                        stack.extend((a, b))

    def free_metas(self, t) -> set:
        metas: set = set()
        self._reach(t, metas, set())
        return metas

    def reachable_sigs(self, t) -> set:
        sigs: set = set()
        self._reach(t, set(), sigs)
        return sigs

    # -- internalising concrete types ----------------------------------------

    def internalize(self, t, tvars: Optional[dict] = None, keys: Optional[dict] = None):
        """Turn ``Sig`` snapshots into classes and mapped ``TVar``s into metas."""
        tvars = {} if tvars is None else tvars
        keys = {} if keys is None else keys
        match t:
            case TVar(n):
                return tvars.get(n, t)
            case TCon() | Meta() | SigVar():
                return t
            case TArrow(a, c):
                return TArrow(self.internalize(a, tvars, keys), self.internalize(c, tvars, keys))
            case THandler(a, b, d):
                return THandler(self.internalize(a, tvars, keys),
                                self.internalize(b, tvars, keys), d)
            case CType(a, e):
                eff = self.universal if e is None and self.universal is not None else e
                if eff is None:
                    eff = self.new_sig()
                return CType(self.internalize(a, tvars, keys), self.internalize(eff, tvars, keys))
            case Sig(entries, closed, key):
                if self.universal is not None:
                    return self.universal
                if key is not None and key in keys:
                    return keys[key]
                sv = self.new_sig(closed=closed)
                if key is not None:
                    keys[key] = sv
                r = self.find(sv)
                for op, a, b in entries:
                    if a is None:
                        self.content[r][op] = None
                    else:
                        self.content[r][op] = (self.internalize(a, tvars, keys),
                                               self.internalize(b, tvars, keys))
                return sv
        raise TypeError(f"not a type: {t!r}")

    # -- unification --------------------------------------------------------

    def unify(self, a, b) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b and not isinstance(a, (TArrow, THandler)):
            return
        if isinstance(a, Meta):
            return self._bind(a, b)
        if isinstance(b, Meta):
            return self._bind(b, a)
        match a, b:
            case TCon(x), TCon(y) if x == y:
                return
            case TVar(x), TVar(y) if x == y:
                return
            case TArrow(a1, c1), TArrow(a2, c2):
                self.unify(a1, a2)
                self.unify_ctype(c1, c2)
                return
            case THandler(f1, t1, d1), THandler(f2, t2, d2):
                if d1 != d2:
                    raise Mismatch(f"handlers of {sorted(d1)} and {sorted(d2)} differ")
                self.unify_ctype(f1, f2)
                self.unify_ctype(t1, t2)
                return
        lhs, rhs = self.show_pair(a, b)
        raise Mismatch(f"cannot unify {lhs} with {rhs}")

    def unify_ctype(self, c1: CType, c2: CType) -> None:
        self.unify(c1.carrier, c2.carrier)
        self.merge(c1.effects, c2.effects)

    def _bind(self, m: Meta, t) -> None:
        if isinstance(t, Meta) and t.id == m.id:
            return
        if m.id in self.free_metas(t):
            lhs, rhs = self.show_pair(m, t)
            raise OccursCheck(f"{lhs} occurs in {rhs}")
        self.metas[m.id] = t

    def merge(self, e1, e2) -> None:
        """Equate two signature classes, unifying the types of shared operations."""
        if self.universal is not None or e1 is None or e2 is None:
            return
        r1, r2 = self.find(e1), self.find(e2)
        if r1 == r2:
            return
        c1, c2 = self.content[r1], self.content[r2]
        k1, k2 = self.closed[r1], self.closed[r2]
        if k1 and k2 and set(c1) != set(c2):
            raise Mismatch(f"signatures {sorted(c1)} and {sorted(c2)} differ")
        if k1 and not set(c2) <= set(c1):
            raise Mismatch(f"operations {sorted(set(c2) - set(c1))} not in {sorted(c1)}")
        if k2 and not set(c1) <= set(c2):
            raise Mismatch(f"operations {sorted(set(c1) - set(c2))} not in {sorted(c2)}")
        self.parent[r2] = r1
        self.closed[r1] = k1 or k2
        shared = []
        for op, entry in c2.items():
            if op in c1:
                shared.append((c1[op], entry))
            else:
                c1[op] = entry
        del self.content[r2]
        for x, y in shared:
            if x is not None:
                self.unify(x[0], y[0])
                self.unify(x[1], y[1])
        self._check_sig_cycle(r1)

    def _check_sig_cycle(self, r: int) -> None:
        r = self.find(SigVar(r))
        for op, entry in self.content[r].items():
            if entry is not None and r in self.reachable_sigs(TArrow(entry[0], CType(entry[1]))):
                raise OccursCheck(f"signature containing {op} occurs in the type of {op}")

    def add_op(self, e: SigVar, op: str, param=None, result=None) -> None:
        """Record ``op : param → result`` in the class of ``e``."""
        if self.universal is not None:
            return
        r = self.find(e)
        cont = self.content[r]
        if op in cont:
            entry = cont[op]
            if entry is not None and param is not None:
                self.unify(entry[0], param)
                self.unify(entry[1], result)
            return
        if self.closed[r]:
            raise UndeclaredOperation(f"operation {op} is not in the closed signature "
                                      f"{{{', '.join(sorted(cont))}}}")
        if param is None:
            cont[op] = None
            return
        if r in self.reachable_sigs(param) or r in self.reachable_sigs(result):
            raise OccursCheck(f"the signature of {op} would refer to itself")
        cont[op] = (param, result)

    def include(self, src: SigVar, dst: SigVar, excluded=frozenset()) -> None:
        if self.universal is not None:
            return
        self.constraints.append((src, dst, frozenset(excluded)))

    def solve(self) -> None:
        """Propagate inclusion constraints to a fixed point."""
        changed = True
        while changed:
            changed = False
            for i, (src, dst, excl) in enumerate(self.constraints):
                for op, entry in list(self.entries(src).items()):
                    if op in excl:
                        continue
                    root = self.find(dst)
                    key = (i, op, root, self.find(src))
                    if key in self._done:
                        continue
                    self._done.add(key)
                    changed = True
                    if entry is None:
                        self.add_op(dst, op)
                    else:
                        self.add_op(dst, op, entry[0], entry[1])

    # -- operation typing ---------------------------------------------------

    def op_type(self, op: str):
        if op not in self.global_sig:
            raise UndeclaredOperation(f"operation {op} is not declared in the global signature")
        a, b = self.global_sig[op]
        return self.internalize(a), self.internalize(b)

    # -- generalisation -----------------------------------------------------

    def generalize(self, env: TypeEnv, t, eff) -> tuple[Scheme, frozenset]:
        self.solve()
        env_metas: set = set()
        env_sigs: set = set()
        for x in env.types():
            self._reach(x, env_metas, env_sigs)
        if eff is not None:
            self._reach(eff, env_metas, env_sigs)
        q = sorted(self.free_metas(t) - env_metas)
        names = {m: TVar(f"'{m}") for m in q}
        scheme = Scheme(tuple(v.name for v in names.values()),
                        self._freeze(t, names, env_sigs, {}))
        return scheme, frozenset(q)

    def _freeze(self, t, names: dict, shared: set, seen: dict):
        t = self.resolve(t)
        match t:
            case Meta(i):
                return names.get(i, t)
            case TArrow(a, c):
                return TArrow(self._freeze(a, names, shared, seen),
                              self._freeze(c, names, shared, seen))
            case THandler(a, b, d):
                return THandler(self._freeze(a, names, shared, seen),
                                self._freeze(b, names, shared, seen), d)
            case CType(a, e):
                return CType(self._freeze(a, names, shared, seen),
                             self._freeze(e, names, shared, seen))
            case SigVar():
                if self.universal is not None:
                    return t
                r = self.find(t)
                if r in shared:
                    return SigVar(r)
                if r in seen:
                    return seen[r]
                cont = self.content[r]
                entries = tuple(sorted(
                    (op, None, None) if entry is None else
                    (op, self._freeze(entry[0], names, shared, seen),
                     self._freeze(entry[1], names, shared, seen))
                    for op, entry in cont.items()))
                sig = Sig(entries, self.closed[r], r)
                seen[r] = sig
                return sig
        return t

    def instantiate(self, sch: Scheme):
        tvars = {q: self.fresh() for q in sch.quantified}
        return self.internalize(sch.body, tvars, {})

    # -- zonking ------------------------------------------------------------

    def zonk(self, t):
        """Fully resolve ``t``; residual metas become ``TVar("'<id>")``."""
        t = self.resolve(t)
        match t:
            case Meta(i):
                return TVar(f"'{i}")
            case TArrow(a, c):
                return TArrow(self.zonk(a), self.zonk(c))
            case THandler(a, b, d):
                return THandler(self.zonk(a), self.zonk(b), d)
            case CType(a, e):
                return CType(self.zonk(a), self.zonk(e))
            case SigVar():
                if self.universal is not None:
                    return None
                r = self.find(t)
                return Sig(tuple(sorted(
                    (op, None, None) if entry is None else
                    (op, self.zonk(entry[0]), self.zonk(entry[1]))
                    for op, entry in self.content[r].items())), self.closed[r])
            case Scheme(q, body):
                return Scheme(q, self.zonk(body))
            case Sig(entries, closed, key):
                return Sig(tuple((op, None if a is None else self.zonk(a),
                                  None if b is None else self.zonk(b))
                                 for op, a, b in entries), closed, key)
        return t

    def show(self, t) -> str:
        try:
            z = self.zonk(t)
        except Exception:  # pragma: no cover - display only
            return repr(t)
        mode = "local" if self.mode == "local" else ("coarse" if self.mode == "coarse" else "none")
        return show_type(z, mode)

    def show_pair(self, a, b) -> tuple[str, str]:
        """Show two types with one shared renaming of their variables."""
        try:
            both = canonical(TArrow(self.zonk(a), CType(self.zonk(b), None)))
        except Exception:  # pragma: no cover - display only
            return self.show(a), self.show(b)
        mode = "local" if self.mode == "local" else ("coarse" if self.mode == "coarse" else "none")
        return show_type(both.dom, mode), show_type(both.cod.carrier, mode)


# ---------------------------------------------------------------------------
# Module-level API mirroring the judgement forms


def unify(a, b, subst: Substitution) -> Substitution:
    subst.unify(subst.internalize(a), subst.internalize(b))
    return subst


def merge_signatures(s1, s2, subst: Substitution):
    """Merge two signatures; concrete ``Sig``s are internalised as open classes."""
    e1 = subst.internalize(s1) if isinstance(s1, Sig) else s1
    e2 = subst.internalize(s2) if isinstance(s2, Sig) else s2
    subst.merge(e1, e2)
    return e1, subst


def instantiate(sch: Scheme, subst: Substitution):
    return subst.instantiate(sch)


def generalize(env: TypeEnv, t, eff, subst: Substitution) -> Scheme:
    return subst.generalize(env, t, eff)[0]


def _annot_type(name: Optional[str]):
    if name is None:
        return None
    if name not in BASE_TYPES:
        raise TypeCheckError(f"unknown base type {name}")
    return BASE_TYPES[name]


def infer_value(env: TypeEnv, v, subst: Substitution):
    match v:
        case s.Var(x):
            t = env.lookup(x)
            if t is None:
                raise UnboundVariable(f"unbound variable {x}")
            if isinstance(t, Scheme):
                return subst.instantiate(t)
            return t
        case s.Bool():
            return BOOL
        case s.Unit():
            return UNIT
        case s.IntLit():
            return INT
        case s.Lam(x, body):
            a = subst.fresh()
            eff = subst.new_sig()
            b = infer_computation(env.bind_mono(x, a), body, subst, eff)
            return TArrow(a, CType(b, eff))
        case s.HandlerVal(h):
            return infer_handler(env, h, subst)
    raise TypeError(f"not a value: {v!r}")


def infer_handler(env: TypeEnv, h: s.Handler, subst: Substitution) -> THandler:
    if subst.mode == "dyn":
        raise TypeCheckError("handlers are not part of the dynamic-scope calculus")
    a, b = subst.fresh(), subst.fresh()
    sig_in, sig_out = subst.new_sig(), subst.new_sig()
    r = infer_computation(env.bind_mono(h.ret_var, a), h.ret_body, subst, sig_out)
    subst.unify(r, b)
    for cl in h.clauses:
        if subst.mode == "local":
            pa, pb = subst.fresh(), subst.fresh()
            subst.add_op(sig_in, cl.op, pa, pb)
        else:
            pa, pb = subst.op_type(cl.op)
            subst.add_op(sig_in, cl.op)
        ann = _annot_type(cl.annot)
        if ann is not None:
            subst.unify(pa, ann)
        k_type = TArrow(pb, CType(b, sig_out))
        body_env = env.bind_mono(cl.param, pa).bind_mono(cl.kont, k_type)
        try:
            r = infer_computation(body_env, cl.body, subst, sig_out)
            subst.unify(r, b)
        except TypeCheckError as exc:
            if exc.where is None:
                exc.where = f"clause for {cl.op}"
            raise
    return THandler(CType(a, sig_in), CType(b, sig_out), h.ops)


def infer_computation(env: TypeEnv, c, subst: Substitution, eff=None):
    """Infer the carrier type of ``c`` with ambient signature class ``eff``."""
    if eff is None:
        eff = subst.new_sig()
    match c:
        case s.Return(v):
            return infer_value(env, v, subst)
        case s.Do(x, c1, c2):
            a = infer_computation(env, c1, subst, eff)
            sch, q = subst.generalize(env, a, eff)
            subst.records.append(DoRecord(x, sch, eff, q))
            return infer_computation(env.bind_poly(x, sch), c2, subst, eff)
        case s.If(v, c1, c2):
            subst.unify(infer_value(env, v, subst), BOOL)
            t1 = infer_computation(env, c1, subst, eff)
            t2 = infer_computation(env, c2, subst, eff)
            subst.unify(t1, t2)
            return t1
        case s.App(v1, v2):
            f = infer_value(env, v1, subst)
            a = infer_value(env, v2, subst)
            r = subst.fresh()
            subst.unify(f, TArrow(a, CType(r, eff)))
            return r
        case s.OpCall(op, v, y, k):
            if subst.mode == "dyn":
                raise TypeCheckError("operation calls are not part of the dynamic-scope calculus")
            a = infer_value(env, v, subst)
            if subst.mode == "local":
                r = subst.fresh()
                subst.add_op(eff, op, a, r)
            else:
                pa, r = subst.op_type(op)
                subst.add_op(eff, op)
                subst.unify(a, pa)
            return infer_computation(env.bind_mono(y, r), k, subst, eff)
        case s.Handle(hv, body):
            if subst.mode == "dyn":
                raise TypeCheckError("handlers are not part of the dynamic-scope calculus")
            ht = subst.resolve(infer_value(env, hv, subst))
            if not isinstance(ht, THandler):
                raise Mismatch(f"expected a handler, got {subst.show(ht)}")
            inner = subst.new_sig()
            t = infer_computation(env, body, subst, inner)
            subst.unify(t, ht.frm.carrier)
            subst.include(inner, ht.frm.effects)
            subst.include(ht.frm.effects, ht.to.effects, ht.handled)
            subst.merge(eff, ht.to.effects)
            subst.solve()
            return ht.to.carrier
        case s.PrimAdd(v1, v2):
            subst.unify(infer_value(env, v1, subst), INT)
            subst.unify(infer_value(env, v2, subst), INT)
            return INT
        case s.Deref(p):
            return _param(subst, p)
        case s.Assign(p, v):
            subst.unify(infer_value(env, v, subst), _param(subst, p))
            return UNIT
        case s.DLet(p, v, body):
            subst.unify(infer_value(env, v, subst), _param(subst, p))
            return infer_computation(env, body, subst, eff)
    raise TypeError(f"not a computation: {c!r}")


def _param(subst: Substitution, p: str):
    if subst.mode != "dyn":
        raise TypeCheckError(f"parameter ${p} used outside the dynamic-scope calculus")
    if p not in subst.params:
        raise ParamNotInSignature(f"parameter ${p} is not in the parameter signature")
    return subst.params[p]


# ---------------------------------------------------------------------------
# Whole programs


@dataclass
class Typing:
    """Result of checking a closed computation."""

    mode: str
    type: object                      # zonked VType
    effects: Optional[Sig]            # None in none/dyn mode
    scheme: Scheme                    # top-level type, generalised
    bindings: list = field(default_factory=list)   # [(name, Scheme, Sig|None)]

    def show(self) -> str:
        return show_typing(self.scheme, self.effects, self.mode)


def show_typing(scheme: Scheme, effects: Optional[Sig], mode: str) -> str:
    """``∀ᾱ. A ! Σ`` with one canonical renaming shared by type and signature."""
    from .types import show_sig
    mode = mode if mode in ("local", "coarse") else "none"
    canon = canonical(Scheme(scheme.quantified, CType(scheme.body, effects)))
    body = canon.body
    effectful = body.effects is not None and body.effects.entries and mode != "none"
    # parenthesise an arrow so its own latent signature is not confused with Σ
    text = show_type(body.carrier, mode, 1 if effectful else 0)
    if effectful:
        text += f" ! {show_sig(body.effects, mode)}"
    if canon.quantified:
        text = f"∀{' '.join(canon.quantified)}. {text}"
    return text


def check_generalization_safety(subst: Substitution) -> None:
    """No quantified meta may appear in the ambient signature of its ``do``."""
    for rec in subst.records:
        metas: set = set()
        subst._reach(rec.effects, metas, set(), raw=True)
        bad = metas & set(rec.quantified_metas)
        if bad:
            raise AssertionError(f"do {rec.name}: generalised {sorted(bad)} occur in its signature")


def infer_closed(c, mode: str = "local", global_sig: Optional[dict] = None,
                 params: Optional[dict] = None, env: TypeEnv = EMPTY_ENV) -> Typing:
    subst = Substitution(mode, global_sig, params)
    eff = subst.new_sig()
    t = infer_computation(env, c, subst, eff)
    subst.solve()
    check_generalization_safety(subst)
    scheme, _ = subst.generalize(env, t, eff)
    scheme = subst.zonk(scheme)
    effects = subst.zonk(eff) if subst.universal is None else None
    bindings = []
    for rec in subst.records:
        if s.is_dummy(rec.name):
            continue
        z = subst.zonk(rec.effects) if subst.universal is None else None
        bindings.append((rec.name, subst.zonk(rec.scheme), z))
    return Typing(mode, subst.zonk(t), effects, scheme, bindings)


def check_against(c, expected_type, expected_effects: Optional[Sig], mode: str = "local",
                  global_sig: Optional[dict] = None, params: Optional[dict] = None) -> None:
    """Check ``c : expected_type ! expected_effects``.

    Type variables in the expectation are rigid.  Every operation ``c`` may
    perform must be in ``expected_effects`` at the stated type.
    """
    subst = Substitution(mode, global_sig, params)
    target = subst.internalize(_close(expected_type))
    if subst.universal is not None:
        eff = subst.universal
    else:
        eff = subst.internalize(_close(expected_effects if expected_effects is not None
                                       else Sig()))
    t = infer_computation(EMPTY_ENV, c, subst, eff)
    subst.unify(t, target)
    subst.solve()


def _close(t):
    from .types import with_closed
    return with_closed(t, True)


def canonical_scheme(sch: Scheme) -> Scheme:
    return canonical(sch)


__all__ = [
    "TypeEnv", "EMPTY_ENV", "Substitution", "kind_check", "unify", "merge_signatures",
    "instantiate", "generalize", "infer_value", "infer_computation", "infer_handler",
    "infer_closed", "check_against", "Typing", "TCon",
]
