"""Types, effect signatures, schemes and their display.

Value types are frozen dataclasses.  During inference two extra forms
appear: ``Meta`` (a unification variable) and ``SigVar`` (a handle on an
effect-signature class kept in a :class:`~hmeff.infer.Substitution`).
Results handed back to callers are *zonked*: metas are resolved (left-over
ones become type variables named ``'<id>``) and signature classes are
frozen into :class:`Sig` snapshots.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

MODES = ("local", "coarse", "none")


# ---------------------------------------------------------------------------
# Errors


class TypeCheckError(Exception):
    """Base class for kinding, unification and typing failures."""

    def __init__(self, message: str, where: Optional[str] = None):
        self.message = message
        self.where = where
        super().__init__(message if where is None else f"{message} (in {where})")


class Mismatch(TypeCheckError):
    pass


class OccursCheck(TypeCheckError):
    pass


class UnboundVariable(TypeCheckError):
    pass


class UnboundTypeVariable(TypeCheckError):
    pass


class UndeclaredOperation(TypeCheckError):
    pass


class ParamNotInSignature(TypeCheckError):
    pass


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TCon:
    name: str  # bool | unit | int


BOOL = TCon("bool")
UNIT = TCon("unit")
INT = TCon("int")
BASE_TYPES = {"bool": BOOL, "unit": UNIT, "int": INT}


@dataclass(frozen=True)
class Meta:
    id: int


@dataclass(frozen=True)
class SigVar:
    id: int


@dataclass(frozen=True)
class Sig:
    """A concrete effect signature.

    ``entries`` holds ``(op, param, result)`` triples sorted by operation.
    In coarse and none modes the two types are ``None``: only operation
    names are tracked and their types live in the global signature.
    ``closed`` says whether the signature may be widened when it meets an
    inference class; ``key`` ties together occurrences that must
    instantiate to the same class.
    """

    entries: tuple = ()
    closed: bool = True
    key: Optional[int] = field(default=None, compare=False)

    @staticmethod
    def of(mapping: dict, closed: bool = True) -> "Sig":
        return Sig(tuple(sorted((op, a, b) for op, (a, b) in mapping.items())), closed)

    @staticmethod
    def names(ops, closed: bool = True) -> "Sig":
        return Sig(tuple(sorted((op, None, None) for op in ops)), closed)

    @property
    def ops(self) -> frozenset[str]:
        return frozenset(e[0] for e in self.entries)

    def lookup(self, op: str):
        for name, a, b in self.entries:
            if name == op:
                return a, b
        return None

    def __len__(self):
        return len(self.entries)


EMPTY = Sig()
Effects = Union[Sig, SigVar, None]


@dataclass(frozen=True)
class CType:
    carrier: "VType"
    effects: Effects = None


@dataclass(frozen=True)
class TArrow:
    dom: "VType"
    cod: CType


@dataclass(frozen=True)
class THandler:
    frm: CType
    to: CType
    handled: frozenset = frozenset()


VType = Union[TVar, TCon, Meta, TArrow, THandler]


@dataclass(frozen=True)
class Scheme:
    quantified: tuple[str, ...]
    body: VType

    @staticmethod
    def mono(t: VType) -> "Scheme":
        return Scheme((), t)


def arrow(a: VType, b: VType, eff: Effects = EMPTY) -> TArrow:
    return TArrow(a, CType(b, eff))


# ---------------------------------------------------------------------------
# Traversals over concrete (zonked) types


def type_vars(t) -> set[str]:
    out: set[str] = set()
    _tvars(t, out)
    return out


def _tvars(t, out):
    match t:
        case TVar(n):
            out.add(n)
        case TArrow(a, c):
            _tvars(a, out)
            _tvars(c, out)
        case THandler(a, b, _):
            _tvars(a, out)
            _tvars(b, out)
        case CType(a, e):
            _tvars(a, out)
            _tvars(e, out)
        case Sig(entries):
            for _, a, b in entries:
                if a is not None:
                    _tvars(a, out)
                    _tvars(b, out)
        case Scheme(q, body):
            inner: set[str] = set()
            _tvars(body, inner)
            out |= inner - set(q)


def is_ground(t) -> bool:
    """No type variables and no function or handler types."""
    return isinstance(t, TCon)


def map_type(t, f):
    """Rebuild ``t`` bottom-up, letting ``f`` replace leaves and signatures."""
    r = f(t)
    if r is not None:
        return r
    match t:
        case TArrow(a, c):
            return TArrow(map_type(a, f), map_type(c, f))
        case THandler(a, b, d):
            return THandler(map_type(a, f), map_type(b, f), d)
        case CType(a, e):
            return CType(map_type(a, f), None if e is None else map_type(e, f))
        case Sig(entries, closed, key):
            return Sig(tuple((op, None if a is None else map_type(a, f),
                              None if b is None else map_type(b, f))
                             for op, a, b in entries), closed, key)
        case Scheme(q, body):
            return Scheme(q, map_type(body, f))
    return t


def strip_effects(t):
    """Drop every effect annotation (the none-mode view of a type)."""
    def f(x):
        if isinstance(x, CType):
            return CType(strip_effects(x.carrier), None)
        return None
    return map_type(t, f)


# ---------------------------------------------------------------------------
# Canonical renaming and display

GREEK = "αβγδεζηθικλμνξοπρστυφχψω"


def _canon_name(i: int) -> str:
    return GREEK[i % len(GREEK)] + (str(i // len(GREEK)) if i >= len(GREEK) else "")


def canonical(t):
    """Rename type variables to α, β, γ… in first-occurrence order.

    Signature keys and closedness are dropped, so two canonical forms are
    equal exactly when the types agree up to renaming.
    """
    order: list[str] = []

    def visit(x):
        match x:
            case TVar(n):
                if n not in order:
                    order.append(n)
            case TArrow(a, c):
                visit(a)
                visit(c)
            case THandler(a, b, _):
                visit(a)
                visit(b)
            case CType(a, e):
                visit(a)
                if e is not None:
                    visit(e)
            case Sig(entries):
                for _, a, b in entries:
                    if a is not None:
                        visit(a)
                        visit(b)

    body = t.body if isinstance(t, Scheme) else t
    visit(body)
    if isinstance(t, Scheme):
        # quantified variables that never occur still get a name
        for q in t.quantified:
            if q not in order:
                order.append(q)
    ren = {n: TVar(_canon_name(i)) for i, n in enumerate(order)}

    def f(x):
        if isinstance(x, TVar):
            return ren.get(x.name, x)
        if isinstance(x, Sig):
            return Sig(tuple((op, None if a is None else map_type(a, f),
                              None if b is None else map_type(b, f))
                             for op, a, b in x.entries), True, None)
        return None

    new_body = map_type(body, f)
    if isinstance(t, Scheme):
        qs = tuple(ren[q].name for q in sorted(t.quantified, key=order.index))
        return Scheme(qs, new_body)
    return new_body


def same_scheme(a, b) -> bool:
    """Equality up to renaming of (bound and free) type variables."""
    if not isinstance(a, Scheme):
        a = Scheme((), a)
    if not isinstance(b, Scheme):
        b = Scheme((), b)
    return canonical(a) == canonical(b)


def show_sig(e: Effects, mode: str = "local") -> str:
    if e is None or mode == "none":
        return ""
    if isinstance(e, SigVar):
        return f"?{e.id}"
    if not e.entries:
        return "∅"
    if mode == "coarse" or e.entries[0][1] is None:
        return "{" + ", ".join(op for op, _, _ in e.entries) + "}"
    parts = [f"{op} : {show_type(a, mode)} → {show_type(b, mode)}" for op, a, b in e.entries]
    return "{" + ", ".join(parts) + "}"


def show_ctype(c: CType, mode: str = "local", always: bool = False) -> str:
    body = show_type(c.carrier, mode, 1)
    eff = c.effects
    if mode == "none" or eff is None:
        return body
    if not always and isinstance(eff, Sig) and not eff.entries:
        return body
    return f"{body} ! {show_sig(eff, mode)}"


def show_type(t, mode: str = "local", prec: int = 0) -> str:
    """Render a type.  Arrows with an empty latent signature omit ``! ∅``."""
    match t:
        case TVar(n):
            return n
        case TCon(n):
            return n
        case Meta(i):
            return f"?m{i}"
        case TArrow(a, c):
            s = f"{show_type(a, mode, 1)} → {show_ctype(c, mode)}"
            return f"({s})" if prec > 0 else s
        case THandler(a, b, _):
            s = f"{show_ctype(a, mode, True)} ⇒ {show_ctype(b, mode, True)}"
            return f"({s})" if prec > 0 else s
        case CType():
            return show_ctype(t, mode)
        case Scheme(q, body):
            inner = show_type(body, mode)
            return f"∀{' '.join(q)}. {inner}" if q else inner
    raise TypeError(f"not a type: {t!r}")


def show_scheme(sch, mode: str = "local", canon: bool = True) -> str:
    if canon:
        sch = canonical(sch)
    return show_type(sch, mode)


def type_to_json(t):
    """Structured form used by ``--json`` output."""
    match t:
        case TVar(n):
            return {"var": n}
        case TCon(n):
            return {"con": n}
        case TArrow(a, c):
            return {"arrow": [type_to_json(a), type_to_json(c)]}
        case THandler(a, b, d):
            return {"handler": [type_to_json(a), type_to_json(b)], "handled": sorted(d)}
        case CType(a, e):
            return {"type": type_to_json(a), "effects": sig_to_json(e)}
        case Scheme(q, body):
            return {"forall": list(q), "body": type_to_json(body)}
    raise TypeError(f"not a type: {t!r}")


def sig_to_json(e):
    if e is None:
        return None
    return [{"op": op} if a is None else {"op": op, "param": type_to_json(a),
                                          "result": type_to_json(b)}
            for op, a, b in e.entries]


def with_closed(t, closed: bool = True):
    """Set the closedness flag on every signature inside ``t``."""
    def g(x):
        if isinstance(x, Sig):
            return Sig(tuple((op, None if a is None else map_type(a, g),
                              None if b is None else map_type(b, g))
                             for op, a, b in x.entries), closed, None)
        return None
    return map_type(t, g)
