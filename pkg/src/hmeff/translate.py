"""Macro translation of dynamically scoped state into effect handlers.

Each parameter ``$p`` becomes a pair of operations ``get_p`` and ``set_p``
and each ``dlet`` becomes the parameter-passing state handler applied to
the initial value.  Types are translated in one of two ways:

* ``ground``: arrows carry the translated parameter signature as their
  latent effect.  This only makes sense when every parameter has a base
  type, otherwise the signature would have to mention itself.
* ``coarse``: arrows carry no annotation of their own; the translated
  signature becomes the global signature of a coarse-mode program.
"""
from __future__ import annotations

from functools import lru_cache

from . import syntax as s
from .infer import TypeEnv
from .types import (UNIT, CType, Scheme, Sig, TArrow, TCon, THandler, TVar,
                    TypeCheckError)

GROUND = "ground"
COARSE = "coarse"
TRANSLATION_MODES = (GROUND, COARSE)


class NonGroundSignature(TypeCheckError):
    pass


def get_op(p: str) -> str:
    return f"get_{p}"


def set_op(p: str) -> str:
    return f"set_{p}"


@lru_cache(maxsize=None)
def state_handler_for(p: str) -> s.HandlerVal:
    """The state handler over ``get_p`` and ``set_p``."""
    from .fixtures import fixture
    h = fixture("H_ST").handler
    names = {"get": get_op(p), "set": set_op(p)}
    clauses = tuple(s.OpClause(names[cl.op], cl.param, cl.kont, cl.body, cl.annot)
                    for cl in h.clauses)
    return s.HandlerVal(s.Handler(h.ret_var, h.ret_body, clauses))


def translate_term(t):
    """Translate a dyn term (value or computation); homomorphic on the shared core."""
    match t:
        case s.Var() | s.Bool() | s.Unit() | s.IntLit():
            return t
        case s.Lam(x, body):
            return s.Lam(x, translate_term(body))
        case s.Return(v):
            return s.Return(translate_term(v))
        case s.Do(x, c1, c2):
            return s.Do(x, translate_term(c1), translate_term(c2))
        case s.If(v, c1, c2):
            return s.If(translate_term(v), translate_term(c1), translate_term(c2))
        case s.App(v1, v2):
            return s.App(translate_term(v1), translate_term(v2))
        case s.PrimAdd(v1, v2):
            return s.PrimAdd(translate_term(v1), translate_term(v2))
        case s.Deref(p):
            return s.op_call(get_op(p), s.UNIT)
        case s.Assign(p, v):
            return s.op_call(set_op(p), translate_term(v))
        case s.DLet(p, v, body):
            f = s.fresh("f")
            return s.Do(f, s.Handle(state_handler_for(p), translate_term(body)),
                        s.App(s.Var(f), translate_term(v)))
        case s.HandlerVal() | s.OpCall() | s.Handle():
            raise ValueError("handler forms do not occur in the dynamic-scope calculus")
    raise TypeError(f"not a term: {t!r}")


def is_ground_signature(params: dict) -> bool:
    return all(isinstance(t, TCon) for t in params.values())


def translate_signature(mode: str, params: dict) -> dict:
    """``{get_p : unit → A, set_p : A → unit}`` for every ``$p : A``."""
    _check_mode(mode)
    if mode == GROUND:
        _require_ground(params)
    out = {}
    for p, a in sorted(params.items()):
        ta = translate_type(mode, a, params)
        out[get_op(p)] = (UNIT, ta)
        out[set_op(p)] = (ta, UNIT)
    return out


def signature_of(mode: str, params: dict) -> Sig:
    """The translated signature as an effect annotation."""
    sig = translate_signature(mode, params)
    if mode == GROUND:
        return Sig.of(sig)
    return Sig.names(sig)


def translate_type(mode: str, t, params: dict):
    """Translate a value type, scheme or environment."""
    _check_mode(mode)
    if mode == GROUND:
        _require_ground(params)
        latent = Sig.of(_ground_sig(params))
    else:
        latent = Sig.names([get_op(p) for p in params] + [set_op(p) for p in params])
    return _tr(t, latent)


def _ground_sig(params: dict) -> dict:
    out = {}
    for p, a in params.items():
        out[get_op(p)] = (UNIT, a)
        out[set_op(p)] = (a, UNIT)
    return out


def _tr(t, latent):
    match t:
        case TVar() | TCon():
            return t
        case TArrow(a, CType(b, _)):
            return TArrow(_tr(a, latent), CType(_tr(b, latent), latent))
        case Scheme(q, body):
            return Scheme(q, _tr(body, latent))
        case TypeEnv(theta, xi, gamma):
            return TypeEnv(theta, tuple((x, _tr(sch, latent)) for x, sch in xi),
                           tuple((x, _tr(a, latent)) for x, a in gamma))
        case THandler():
            raise ValueError("handler types do not occur in the dynamic-scope calculus")
    raise TypeError(f"not a type: {t!r}")


def _require_ground(params: dict) -> None:
    bad = sorted(p for p, a in params.items() if not isinstance(a, TCon))
    if bad:
        raise NonGroundSignature(
            "the annotated translation needs base-type parameters; "
            + ", ".join(f"${p}" for p in bad) + " would make the signature refer to itself")


def _check_mode(mode: str) -> None:
    if mode not in TRANSLATION_MODES:
        raise ValueError(f"unknown translation mode {mode!r}")


def translate_program(c: s.Computation, params: dict, mode: str) -> str:
    """Source text of the translated program, header included."""
    from .pretty import pretty_program
    body = translate_term(c)
    if mode == GROUND:
        _require_ground(params)
        return pretty_program(body, "local")
    return pretty_program(body, "coarse", translate_signature(COARSE, params))


__all__ = ["state_handler_for", "translate_term", "translate_type", "translate_signature",
           "signature_of", "translate_program", "NonGroundSignature", "GROUND", "COARSE",
           "get_op", "set_op", "is_ground_signature"]
