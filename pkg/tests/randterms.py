"""Random closed terms for syntactic property tests (not necessarily well-typed)."""
from __future__ import annotations

import random

from hmeff import syntax as s

OPS = ("get", "set", "op")
PARAMS = ("p", "q")


class TermGen:
    def __init__(self, seed: int, dyn: bool = False, open_vars=()):
        self.rng = random.Random(seed)
        self.dyn = dyn
        self.n = 0
        self.open_vars = list(open_vars)

    def name(self) -> str:
        self.n += 1
        return self.rng.choice("xyzkf") + str(self.n)

    def value(self, depth: int, env: list):
        choices = ["bool", "unit", "int"]
        if env:
            choices += ["var", "var"]
        if depth > 0:
            choices += ["lam"]
            if not self.dyn:
                choices += ["handler"]
        match self.rng.choice(choices):
            case "bool":
                return s.Bool(self.rng.random() < 0.5)
            case "unit":
                return s.UNIT
            case "int":
                return s.IntLit(self.rng.randint(0, 9))
            case "var":
                return s.Var(self.rng.choice(env))
            case "lam":
                x = self.name()
                return s.Lam(x, self.comp(depth - 1, env + [x]))
            case "handler":
                xr = self.name()
                clauses = []
                for op in self.rng.sample(OPS, self.rng.randint(0, len(OPS))):
                    x, k = self.name(), self.name()
                    annot = self.rng.choice([None, None, "unit", "int"])
                    clauses.append(s.OpClause(op, x, k, self.comp(depth - 1, env + [x, k]), annot))
                return s.HandlerVal(s.Handler(xr, self.comp(depth - 1, env + [xr]), tuple(clauses)))
        raise AssertionError

    def comp(self, depth: int, env: list):
        env = env + self.open_vars if not env and self.open_vars else env
        if depth <= 0:
            return s.Return(self.value(0, env))
        forms = ["return", "do", "dummy", "if", "app", "add"]
        if self.dyn:
            forms += ["deref", "assign", "dlet"]
        else:
            forms += ["op", "handle"]
        d = depth - 1
        match self.rng.choice(forms):
            case "return":
                return s.Return(self.value(d, env))
            case "do":
                x = self.name()
                return s.Do(x, self.comp(d, env), self.comp(d, env + [x]))
            case "dummy":
                return s.Do(s.fresh("_"), self.comp(d, env), self.comp(d, env))
            case "if":
                return s.If(self.value(d, env), self.comp(d, env), self.comp(d, env))
            case "app":
                return s.App(self.value(d, env), self.value(d, env))
            case "add":
                return s.PrimAdd(self.value(d, env), self.value(d, env))
            case "op":
                y = self.name()
                return s.OpCall(self.rng.choice(OPS), self.value(d, env), y, self.comp(d, env + [y]))
            case "handle":
                h = self.value(d, env) if env and self.rng.random() < 0.2 else None
                if not isinstance(h, (s.Var, s.HandlerVal)):
                    h = s.HandlerVal(s.Handler("r", s.Return(s.Var("r")), ()))
                return s.Handle(h, self.comp(d, env))
            case "deref":
                return s.Deref(self.rng.choice(PARAMS))
            case "assign":
                return s.Assign(self.rng.choice(PARAMS), self.value(d, env))
            case "dlet":
                return s.DLet(self.rng.choice(PARAMS), self.value(d, env), self.comp(d, env))
        raise AssertionError


def random_comp(seed: int, depth: int = 4, dyn: bool = False):
    return TermGen(seed, dyn).comp(depth, [])


def naive_subst(t, v, x):
    """Substitution for closed ``v``: no renaming is ever needed."""
    match t:
        case s.Var(y):
            return v if y == x else t
        case s.Bool() | s.Unit() | s.IntLit() | s.Deref():
            return t
        case s.Lam(y, b):
            return t if y == x else s.Lam(y, naive_subst(b, v, x))
        case s.HandlerVal(h):
            ret = h.ret_body if h.ret_var == x else naive_subst(h.ret_body, v, x)
            cls = tuple(cl if x in (cl.param, cl.kont) else
                        s.OpClause(cl.op, cl.param, cl.kont, naive_subst(cl.body, v, x), cl.annot)
                        for cl in h.clauses)
            return s.HandlerVal(s.Handler(h.ret_var, ret, cls))
        case s.Return(w):
            return s.Return(naive_subst(w, v, x))
        case s.Do(y, c1, c2):
            return s.Do(y, naive_subst(c1, v, x), c2 if y == x else naive_subst(c2, v, x))
        case s.If(w, c1, c2):
            return s.If(naive_subst(w, v, x), naive_subst(c1, v, x), naive_subst(c2, v, x))
        case s.App(a, b):
            return s.App(naive_subst(a, v, x), naive_subst(b, v, x))
        case s.PrimAdd(a, b):
            return s.PrimAdd(naive_subst(a, v, x), naive_subst(b, v, x))
        case s.OpCall(op, w, y, k):
            return s.OpCall(op, naive_subst(w, v, x), y, k if y == x else naive_subst(k, v, x))
        case s.Handle(h, c):
            return s.Handle(naive_subst(h, v, x), naive_subst(c, v, x))
        case s.Assign(p, w):
            return s.Assign(p, naive_subst(w, v, x))
        case s.DLet(p, w, c):
            return s.DLet(p, naive_subst(w, v, x), naive_subst(c, v, x))
    raise TypeError(t)
