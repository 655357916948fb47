"""Named example programs, written in the concrete syntax.

The ``get`` clauses of the two state handlers annotate their ignored
parameter as ``unit``; without it the parameter type of ``get`` would be
left fully polymorphic.
"""
from __future__ import annotations

from functools import lru_cache

from . import syntax as s
from .parser import parse_computation, parse_value

SOURCES: dict[str, tuple[str, str]] = {
    # name -> (kind, source)
    "T": ("comp", """
        if get () then (set false; return true) else (set true; return false)
    """),
    "H_C": ("value", """
        handler {
          return x -> return x
        | get(_; k) -> k true
        | set(s; k) -> k ()
        }
    """),
    "H_ST": ("value", """
        handler {
          return x -> return (fun _ -> return x)
        | get(_ : unit; k) -> return (fun s -> (k s) s)
        | set(s'; k) -> return (fun _ -> (k ()) s')
        }
    """),
    "H_RO": ("value", """
        handler {
          return x -> return (fun _ -> return x)
        | get(_ : unit; k) -> return (fun s -> (k s) s)
        | set(s'; k) -> return (fun s -> (k ()) s)
        }
    """),
    "H_div": ("value", """
        handler {
          return x -> return x
        | op(_; k) -> k (fun _ -> op () ())
        }
    """),
    "dyn_example": ("dyn", """
        do f <- (dlet $p = 0 in return (fun _ -> $p := 1 + !$p)) in
        dlet $p = 1 in
        f (); !$p
    """),
    "id_id": ("comp", """
        do id <- (fun f -> return f) (fun x -> return x) in
        id id
    """),
    "proposition": ("dyn", """
        dlet $p = (fun a -> (!$p) a) in (!$p) ()
    """),
}

# Global signatures and parameter signatures that go with some fixtures.
H_DIV_SIGNATURE = "op : unit -> (unit -> unit)"
DYN_EXAMPLE_PARAMS = {"p": "int"}
PROPOSITION_PARAMS = {"p": "unit -> int"}


class UnknownFixture(KeyError):
    pass


@lru_cache(maxsize=None)
def fixture(name: str):
    try:
        kind, text = SOURCES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; choose from {', '.join(SOURCES)}") from None
    match kind:
        case "value":
            return parse_value(text)
        case "dyn":
            return parse_computation(text, dyn=True)
        case _:
            return parse_computation(text)


def fixture_source(name: str) -> str:
    if name not in SOURCES:
        raise UnknownFixture(f"unknown fixture {name!r}")
    import textwrap
    return textwrap.dedent(SOURCES[name][1]).strip() + "\n"


def h_div_program() -> s.Computation:
    """``with H_div handle op () ()``."""
    return s.Handle(fixture("H_div"), parse_computation("op () ()"))


FIXTURE_NAMES = tuple(SOURCES)
