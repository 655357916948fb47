"""Concrete syntax: lexer, recursive-descent parser and sugar elaboration.

Surface syntax::

    fun x y -> c            do x <- c1 in c2          c1; c2
    if c then c1 else c2    with v handle c           c1 c2
    op(v; y. c)             handler { return x -> c | op(x; k) -> c }
    c1 + c2                 !$p     $p := c           dlet $p = v in c

An identifier that is not bound as a variable names an operation; used
bare it stands for the operation's generic effect.  A program file starts
with an optional header::

    mode local|coarse|none;
    signature { op : A -> B; ... }
    params { $p : A; ... }

A ``params`` header makes the file a dynamic-scope program, in which
handlers and operations are rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import syntax as s
from .types import BASE_TYPES, CType, Scheme, Sig, TArrow, THandler, TVar


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {message}")


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = {"fun", "do", "in", "if", "then", "else", "with", "handle", "handler",
            "return", "true", "false", "dlet", "mode", "signature", "params",
            "forall", "bool", "unit", "int"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<param>\$[A-Za-z_][A-Za-z0-9_']*)
  | (?P<tvar>'[A-Za-z][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*|[α-ωΑ-Ω][0-9]*)
  | (?P<sym><-|->|:=|=>|\(\)|[(){};.|!+=:,∀→⇒∅])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str   # num | param | tvar | ident | kw | sym | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "ident" and tok in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# Surface syntax


@dataclass(frozen=True)
class SName:
    """An identifier; resolved to a variable or a bare operation by scope."""
    name: str
    is_op: bool = False


@dataclass(frozen=True)
class SFun:
    params: tuple
    body: object


@dataclass(frozen=True)
class SHandler:
    ret_var: str
    ret_body: object
    clauses: tuple   # ((op, x, k, body, annot), ...)


@dataclass(frozen=True)
class SReturn:
    expr: object


@dataclass(frozen=True)
class SDo:
    var: str
    first: object
    rest: object


@dataclass(frozen=True)
class SSeq:
    first: object
    rest: object


@dataclass(frozen=True)
class SIf:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class SApp:
    fn: object
    arg: object


@dataclass(frozen=True)
class SOpCall:
    op: str
    arg: object
    var: str
    cont: object


@dataclass(frozen=True)
class SWith:
    handler: object
    body: object


@dataclass(frozen=True)
class SAdd:
    left: object
    right: object


@dataclass(frozen=True)
class SAssign:
    param: str
    expr: object


@dataclass(frozen=True)
class SDLet:
    param: str
    value: object
    body: object


@dataclass
class Program:
    mode: str = "local"
    global_signature: Optional[dict] = None   # op -> (A, B)
    params: Optional[dict] = None             # p -> A   (dyn programs)
    body: object = None                       # surface syntax

    @property
    def is_dyn(self) -> bool:
        return self.params is not None

    def core(self):
        return elaborate(self.body)


# ---------------------------------------------------------------------------
# Parser


class Parser:
    def __init__(self, text: str, dyn: bool = False, bound: frozenset = frozenset()):
        self.toks = tokenize(text)
        self.i = 0
        self.dyn = dyn
        self.scope: list[str] = list(bound)

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("kw", "sym")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def binder(self) -> str:
        name = self.ident()
        return s.fresh("_") if name == "_" else name

    def param(self) -> str:
        if self.tok.kind != "param":
            self.fail("expected a parameter ($name)")
        return self.advance().text[1:]

    # -- scoping --------------------------------------------------------------

    def bound(self, name: str) -> bool:
        return name in self.scope

    def with_bound(self, names, fn):
        self.scope.extend(names)
        try:
            return fn()
        finally:
            del self.scope[len(self.scope) - len(names):]

    # -- programs -------------------------------------------------------------

    def program(self) -> Program:
        prog = Program()
        while True:
            if self.at("mode"):
                self.advance()
                m = self.ident() if self.tok.kind == "ident" else self.advance().text
                if m not in ("local", "coarse", "none"):
                    self.fail(f"unknown mode {m!r}")
                prog.mode = m
                self.expect(";")
            elif self.at("signature"):
                self.advance()
                prog.global_signature = self.signature_block()
            elif self.at("params"):
                self.advance()
                prog.params = self.params_block()
                self.dyn = True
            else:
                break
        if prog.mode != "local" and prog.global_signature is None and not prog.is_dyn:
            prog.global_signature = {}
        prog.body = self.comp()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")
        return prog

    def signature_block(self) -> dict:
        self.expect("{")
        out = {}
        while not self.at("}"):
            op = self.ident()
            self.expect(":")
            a = self.type_atom()
            self.expect("->") if self.at("->") else self.expect("→")
            b = self.vtype()
            if op in out:
                self.fail(f"operation {op} declared twice")
            out[op] = (a, b)
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        if self.at(";"):
            self.advance()
        return out

    def params_block(self) -> dict:
        self.expect("{")
        out = {}
        while not self.at("}"):
            p = self.param()
            self.expect(":")
            out[p] = self.vtype()
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        if self.at(";"):
            self.advance()
        return out

    # -- types ----------------------------------------------------------------

    def scheme(self):
        if self.at("forall") or self.at("∀"):
            self.advance()
            names = []
            while not self.at("."):
                names.append(self.tvar_name())
                if self.at(","):
                    self.advance()
            self.expect(".")
            return Scheme(tuple(names), self.vtype())
        return self.vtype()

    def tvar_name(self) -> str:
        t = self.advance()
        if t.kind == "tvar":
            return t.text[1:]
        if t.kind == "ident":
            return t.text
        raise ParseError("expected a type variable", t.line, t.col)

    def vtype(self):
        """``A``, ``A -> B``, ``A -> B ! Σ`` or ``A ! Σ => B ! Σ'``."""
        left = self.ctype_or_type()
        if self.at("=>") or self.at("⇒"):
            self.advance()
            right = self.ctype_or_type()
            frm = left if isinstance(left, CType) else CType(left, None)
            to = right if isinstance(right, CType) else CType(right, None)
            return THandler(frm, to, frm.effects.ops if isinstance(frm.effects, Sig) else frozenset())
        if isinstance(left, CType):
            self.fail("effect annotation outside an arrow or handler type")
        return left

    def ctype_or_type(self):
        a = self.type_atom()
        if self.at("->") or self.at("→"):
            self.advance()
            b = self.ctype_or_type()
            if isinstance(b, CType):
                return TArrow(a, b)
            return TArrow(a, CType(b, None))
        if self.at("!"):
            self.advance()
            return CType(a, self.sig_literal())
        return a

    def type_atom(self):
        t = self.tok
        if t.kind == "kw" and t.text in BASE_TYPES:
            self.advance()
            return BASE_TYPES[t.text]
        if t.kind == "tvar":
            self.advance()
            return TVar(t.text[1:])
        if t.kind == "ident":
            self.advance()
            return TVar(t.text)
        if self.at("()"):
            self.advance()
            return BASE_TYPES["unit"]
        if self.at("("):
            self.advance()
            ty = self.vtype()
            if self.at("!"):
                self.advance()
                ty = CType(ty, self.sig_literal())
            self.expect(")")
            return ty
        self.fail(f"expected a type, found {t.text!r}")

    def sig_literal(self) -> Sig:
        if self.at("∅"):
            self.advance()
            return Sig()
        self.expect("{")
        entries = {}
        names = []
        while not self.at("}"):
            op = self.ident()
            if self.at(":"):
                self.advance()
                a = self.type_atom()
                self.expect("->") if self.at("->") else self.expect("→")
                b = self.type_atom()
                entries[op] = (a, b)
            else:
                names.append(op)
            if not self.at("}"):
                self.expect(",") if self.at(",") else self.expect(";")
        self.expect("}")
        if names and entries:
            self.fail("mix of typed and untyped signature entries")
        return Sig.names(names) if names else Sig.of(entries)

    # -- computations ---------------------------------------------------------

    def comp(self):
        first = self.stmt()
        if self.at(";"):
            self.advance()
            return SSeq(first, self.comp())
        return first

    def stmt(self):
        t = self.tok
        if t.kind == "kw":
            if t.text == "do":
                self.advance()
                x = self.binder()
                self.expect("<-")
                c1 = self.comp()
                self.expect("in")
                c2 = self.with_bound([x], self.comp)
                return SDo(x, c1, c2)
            if t.text == "if":
                self.advance()
                c = self.comp()
                self.expect("then")
                c1 = self.comp()
                self.expect("else")
                c2 = self.stmt()
                return SIf(c, c1, c2)
            if t.text == "with":
                if self.dyn:
                    self.fail("handlers are not allowed in a dynamic-scope program")
                self.advance()
                h = self.comp()
                self.expect("handle")
                return SWith(h, self.comp())
            if t.text == "dlet":
                self.advance()
                p = self.param()
                self.expect("=")
                v = self.add()
                self.expect("in")
                return SDLet(p, v, self.comp())
            if t.text == "return":
                self.advance()
                if self.at("fun"):
                    return SReturn(self.fun())
                return SReturn(self.add())
            if t.text == "fun":
                return self.fun()
        if t.kind == "param" and self.peek().text == ":=":
            p = self.param()
            self.advance()
            return SAssign(p, self.add())
        return self.add()

    def fun(self):
        self.expect("fun")
        names = []
        while not self.at("->"):
            names.append(self.binder())
        if not names:
            self.fail("fun needs at least one parameter")
        self.expect("->")
        body = self.with_bound(names, self.comp)
        return SFun(tuple(names), body)

    def add(self):
        left = self.app()
        while self.at("+"):
            self.advance()
            left = SAdd(left, self.app())
        return left

    def app(self):
        head = self.atom()
        while self.starts_atom():
            head = SApp(head, self.atom())
        return head

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "num"):
            return True
        if t.kind == "kw" and t.text in ("true", "false", "handler", "fun"):
            return True
        return t.kind == "sym" and t.text in ("(", "()", "!")

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return s.IntLit(int(t.text))
        if t.kind == "kw":
            if t.text == "true":
                self.advance()
                return s.TRUE
            if t.text == "false":
                self.advance()
                return s.FALSE
            if t.text == "handler":
                return self.handler()
            if t.text == "fun":
                return self.fun()
        if self.at("()"):
            self.advance()
            return s.UNIT
        if self.at("!"):
            self.advance()
            return s.Deref(self.param())
        if self.at("("):
            self.advance()
            e = self.comp()
            self.expect(")")
            return e
        if t.kind == "ident":
            if self.peek().text == "(" and not self.bound(t.text):
                call = self.try_op_call()
                if call is not None:
                    return call
            self.advance()
            if self.bound(t.text):
                return SName(t.text)
            if self.dyn:
                raise ParseError(f"unbound variable {t.text}", t.line, t.col)
            return SName(t.text, is_op=True)
        self.fail(f"unexpected {t.text or 'end of input'!r}")

    def try_op_call(self):
        """``op(v; y. c)``; returns None (and rewinds) if the shape does not match."""
        start = self.i
        op = self.advance().text
        self.advance()  # "("
        try:
            arg = self.add()
            if not self.at(";") or self.peek().kind != "ident" or self.peek(2).text != ".":
                raise ParseError("not an operation call")
        except ParseError:
            self.i = start
            return None
        if self.dyn:
            self.fail("operation calls are not allowed in a dynamic-scope program")
        self.advance()
        y = self.binder()
        self.expect(".")
        cont = self.with_bound([y], self.comp)
        self.expect(")")
        return SOpCall(op, arg, y, cont)

    def handler(self):
        if self.dyn:
            self.fail("handlers are not allowed in a dynamic-scope program")
        self.expect("handler")
        self.expect("{")
        ret = None
        clauses = []
        seen = set()
        while True:
            if self.at("|"):
                self.advance()
            if self.at("}"):
                break
            if self.at("return"):
                self.advance()
                x = self.binder()
                self.expect("->")
                body = self.with_bound([x], self.comp)
                if ret is not None:
                    self.fail("duplicate return clause")
                ret = (x, body)
            else:
                op = self.ident()
                if op in seen:
                    self.fail(f"duplicate clause for {op}")
                seen.add(op)
                self.expect("(")
                x = self.binder()
                annot = None
                if self.at(":"):
                    self.advance()
                    t = self.advance()
                    if t.text not in BASE_TYPES:
                        raise ParseError("clause annotations must be bool, unit or int",
                                         t.line, t.col)
                    annot = t.text
                self.expect(";")
                k = self.binder()
                self.expect(")")
                self.expect("->")
                body = self.with_bound([x, k], self.comp)
                clauses.append((op, x, k, body, annot))
            if self.at(","):
                self.advance()
        self.expect("}")
        if ret is None:
            x = s.fresh("x")
            ret = (x, SReturn(SName(x)))
        return SHandler(ret[0], ret[1], tuple(clauses))


# ---------------------------------------------------------------------------
# Entry points


def parse(text: str) -> Program:
    """Parse a program file (header plus body); the body is left unelaborated."""
    return Parser(text).program()


def parse_computation(text: str, dyn: bool = False, bound=()) -> s.Computation:
    """Parse and elaborate a bare computation."""
    p = Parser(text, dyn=dyn, bound=frozenset(bound))
    e = p.comp()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return elaborate(e)


def parse_value(text: str, bound=()) -> s.Value:
    p = Parser(text, bound=frozenset(bound))
    e = p.add()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    v = elab_value(e)
    if v is None:
        raise ParseError("expected a value")
    return v


def parse_type(text: str):
    """Parse a value type or a scheme (``forall a b. ...`` or ``∀α β. ...``)."""
    p = Parser(text)
    t = p.scheme()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return t


def parse_signature(text: str) -> dict:
    """Parse ``{ op : A -> B; ... }``; the braces may be left out."""
    text = text.strip()
    if not text.startswith("{"):
        text = "{" + text + "}"
    p = Parser(text)
    out = p.signature_block()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return out


# ---------------------------------------------------------------------------
# Elaboration


def elab_value(e) -> Optional[s.Value]:
    """The core value denoted by ``e``, or None if ``e`` is not a value."""
    match e:
        case s.Var() | s.Bool() | s.Unit() | s.IntLit():
            return e
        case s.Lam(x, body):
            return s.Lam(x, elaborate(body))
        case s.HandlerVal(h):
            return s.HandlerVal(_elab_handler_core(h))
        case SName(name, is_op):
            return s.generic_effect(name) if is_op else s.Var(name)
        case SFun(params, body):
            out = s.Lam(params[-1], elaborate(body))
            for x in reversed(params[:-1]):
                out = s.Lam(x, s.Return(out))
            return out
        case SHandler(xr, cr, clauses):
            return s.HandlerVal(s.Handler(
                xr, elaborate(cr),
                tuple(s.OpClause(op, x, k, elaborate(c), annot) for op, x, k, c, annot in clauses)))
    return None


def _elab_handler_core(h: s.Handler) -> s.Handler:
    return s.Handler(h.ret_var, elaborate(h.ret_body),
                     tuple(s.OpClause(cl.op, cl.param, cl.kont, elaborate(cl.body), cl.annot)
                           for cl in h.clauses))


def _atomize(e, k):
    """Call-by-value sugar: bind ``e`` to a fresh variable unless it is a value."""
    v = elab_value(e)
    if v is not None:
        return k(v)
    x = s.fresh("f")
    return s.Do(x, elaborate(e), k(s.Var(x)))


def elaborate(e) -> s.Computation:
    """Expand sugar into core computations.  Core input is returned unchanged
    up to recursion, so elaboration is idempotent."""
    match e:
        case s.Return(v):
            return s.Return(elab_value(v))
        case s.Do(x, c1, c2):
            return s.Do(x, elaborate(c1), elaborate(c2))
        case s.If(v, c1, c2):
            return s.If(elab_value(v), elaborate(c1), elaborate(c2))
        case s.App(v1, v2):
            return s.App(elab_value(v1), elab_value(v2))
        case s.OpCall(op, v, y, c):
            return s.OpCall(op, elab_value(v), y, elaborate(c))
        case s.Handle(h, c):
            return s.Handle(elab_value(h), elaborate(c))
        case s.PrimAdd(v1, v2):
            return s.PrimAdd(elab_value(v1), elab_value(v2))
        case s.Deref():
            return e
        case s.Assign(p, v):
            return s.Assign(p, elab_value(v))
        case s.DLet(p, v, c):
            return s.DLet(p, elab_value(v), elaborate(c))
        case SReturn(x):
            v = elab_value(x)
            if v is None:
                raise ParseError("return expects a value")
            return s.Return(v)
        case SDo(x, c1, c2):
            return s.Do(x, elaborate(c1), elaborate(c2))
        case SSeq(c1, c2):
            return s.Do(s.fresh("_"), elaborate(c1), elaborate(c2))
        case SIf(c, c1, c2):
            return _atomize(c, lambda v: s.If(v, elaborate(c1), elaborate(c2)))
        case SApp(f, a):
            return _atomize(f, lambda fv: _atomize(a, lambda av: s.App(fv, av)))
        case SOpCall(op, a, y, c):
            return _atomize(a, lambda av: s.OpCall(op, av, y, elaborate(c)))
        case SWith(h, c):
            return _atomize(h, lambda hv: s.Handle(hv, elaborate(c)))
        case SAdd(a, b):
            return _atomize(a, lambda av: _atomize(b, lambda bv: s.PrimAdd(av, bv)))
        case SAssign(p, a):
            return _atomize(a, lambda av: s.Assign(p, av))
        case SDLet(p, a, c):
            return _atomize(a, lambda av: s.DLet(p, av, elaborate(c)))
    if elab_value(e) is not None:
        raise ParseError(f"a value is not a computation (use return): {e!r}")
    raise ParseError(f"cannot elaborate {e!r}")


def program_mode(prog: Program) -> str:
    return "dyn" if prog.is_dyn else prog.mode
