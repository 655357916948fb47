import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmeff import syntax as s
from hmeff.fixtures import FIXTURE_NAMES, fixture
from hmeff.parser import elaborate, parse_computation, parse_value
from hmeff.pretty import pretty
from randterms import TermGen, naive_subst, random_comp

x, y, z = s.Var("x"), s.Var("y"), s.Var("z")


def test_free_vars_examples():
    assert s.free_vars(s.Lam("x", s.Return(x))) == frozenset()
    assert s.free_vars(s.Do("x", s.Return(y), s.Return(x))) == {"y"}
    assert s.free_vars(s.OpCall("op", x, "y", s.Return(y))) == {"x"}
    h = s.Handler("r", s.Return(z), (s.OpClause("op", "a", "k", s.App(s.Var("k"), s.Var("a"))),))
    assert s.free_vars(s.HandlerVal(h)) == {"z"}


def test_free_params_dlet_binds():
    v = s.Lam("a", s.Deref("q"))
    assert s.free_params(s.DLet("p", v, s.Deref("p"))) == s.free_params(v) == {"q"}
    assert s.free_params(s.Do("x", s.Assign("p", s.UNIT), s.Deref("r"))) == {"p", "r"}


def test_substitute_examples():
    assert s.substitute(s.Return(x), s.TRUE, "x") == s.Return(s.TRUE)
    lam = s.Lam("x", s.Return(x))
    assert s.substitute(s.Return(lam), s.TRUE, "x") == s.Return(lam)
    c = s.OpCall("op", x, "y", s.Return(y))
    assert s.substitute(c, s.UNIT, "x") == s.OpCall("op", s.UNIT, "y", s.Return(y))


def test_substitute_renames_to_avoid_capture():
    c = s.OpCall("op", x, "y", s.Return(s.App(x, y)))
    out = s.substitute(c, y, "x")
    assert isinstance(out, s.OpCall) and out.var != "y"
    assert out.arg == y
    assert s.free_vars(out) == {"y"}
    assert s.alpha_eq(out, s.OpCall("op", y, "w", s.Return(s.App(y, s.Var("w")))))


def test_substitute_under_handler_binders():
    h = s.Handler("r", s.Return(x), (s.OpClause("op", "a", "k", s.App(s.Var("k"), x)),))
    out = s.substitute(s.HandlerVal(h), s.Var("k"), "x")
    cl = out.handler.clauses[0]
    assert cl.kont != "k" and s.free_vars(out) == {"k"}
    assert out.handler.ret_body == s.Return(s.Var("k"))


def test_alpha_eq():
    assert s.alpha_eq(s.Lam("x", s.Return(x)), s.Lam("y", s.Return(y)))
    assert not s.alpha_eq(s.Lam("x", s.Return(y)), s.Lam("y", s.Return(y)))
    assert not s.alpha_eq(s.Return(x), s.Return(y))
    assert s.alpha_eq(s.Deref("p"), s.Deref("p")) and not s.alpha_eq(s.Deref("p"), s.Deref("q"))
    h1 = s.Handler("r", s.Return(s.Var("r")), (s.OpClause("a", "x", "k", s.Return(x)),
                                               s.OpClause("b", "x", "k", s.Return(s.Var("k")))))
    h2 = s.Handler("q", s.Return(s.Var("q")), tuple(reversed(h1.clauses)))
    assert s.alpha_eq(s.HandlerVal(h1), s.HandlerVal(h2))


def test_handler_rejects_duplicate_clauses():
    cl = s.OpClause("op", "x", "k", s.Return(x))
    with pytest.raises(ValueError):
        s.Handler("r", s.Return(s.Var("r")), (cl, cl))


def test_generic_effect():
    g = s.generic_effect("get")
    assert isinstance(g, s.Lam)
    assert isinstance(g.body, s.OpCall) and g.body.op == "get" and g.body.arg == s.Var(g.param)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([s.TRUE, s.UNIT, s.IntLit(4),
                                               s.Lam("a", s.Return(s.Var("a")))]))
def test_substitution_matches_naive_oracle_on_closed_values(seed, v):
    g = TermGen(seed, open_vars=["x"])
    t = g.comp(4, ["x"])
    assert s.substitute(t, v, "x") == naive_subst(t, v, "x")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_substitution_never_captures(seed):
    g = TermGen(seed, open_vars=["x"])
    t = g.comp(4, ["x"])
    # every binder name the generator uses could be captured by a naive substitution
    v = s.App(s.Var("x1"), s.Var("y2"))
    out = s.substitute(t, v, "x")
    expected = (s.free_vars(t) - {"x"}) | (s.free_vars(v) if "x" in s.free_vars(t) else set())
    assert s.free_vars(out) == expected


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixtures_round_trip(name):
    t = fixture(name)
    dyn = name in ("dyn_example", "proposition")
    if s.is_value(t):
        back = parse_value(pretty(t))
    else:
        back = parse_computation(pretty(t), dyn=dyn)
    assert s.alpha_eq(back, t)


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 10**9), st.booleans())
def test_random_terms_round_trip(seed, dyn):
    t = random_comp(seed, 4, dyn)
    text = pretty(t)
    assert s.alpha_eq(parse_computation(text, dyn=dyn), t), text


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_elaborate_is_idempotent(seed):
    t = random_comp(seed, 4)
    assert elaborate(t) == t
    assert elaborate(elaborate(t)) == elaborate(t)


def test_term_size_and_operations():
    c = parse_computation("do x <- get () in set x; return x")
    assert s.operations(c) == {"get", "set"}
    assert s.term_size(s.Return(s.UNIT)) == 2
