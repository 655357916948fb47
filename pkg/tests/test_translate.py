import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmeff import syntax as s
from hmeff.dynstate import DLetFrame, DoFrame, plug
from hmeff.eval import Terminal, run
from hmeff.fixtures import PROPOSITION_PARAMS, fixture
from hmeff.infer import TypeEnv, check_against, infer_closed
from hmeff.parser import parse, parse_type
from hmeff.translate import (COARSE, GROUND, NonGroundSignature, signature_of,
                             state_handler_for, translate_program, translate_signature,
                             translate_term, translate_type)
from hmeff.types import BOOL, INT, UNIT, Scheme, Sig, TVar, arrow, same_scheme
from randterms import TermGen


def test_state_handler_renames_operations():
    hp = state_handler_for("p")
    h = fixture("H_ST").handler
    assert {cl.op for cl in hp.handler.clauses} == {"get_p", "set_p"}
    for cl in h.clauses:
        cp = hp.handler.clause(cl.op + "_p")
        assert s.alpha_eq(s.Lam(cl.param, s.Lam(cl.kont, cl.body)),
                          s.Lam(cp.param, s.Lam(cp.kont, cp.body)))
    assert s.alpha_eq(s.Lam(h.ret_var, h.ret_body), s.Lam(hp.handler.ret_var, hp.handler.ret_body))


def test_distinct_parameters_give_disjoint_operations():
    ops = lambda p: {cl.op for cl in state_handler_for(p).handler.clauses}
    assert not ops("p") & ops("q")


def test_state_handler_scheme():
    t = infer_closed(s.Return(state_handler_for("p")))
    expected = parse_type(
        "forall a b. a ! {get_p : unit -> b; set_p : b -> unit} => (b -> a ! {}) ! {}")
    assert same_scheme(t.scheme, expected)


def test_term_translation_examples():
    assert translate_term(s.Return(s.TRUE)) == s.Return(s.TRUE)
    out = translate_term(s.Deref("p"))
    assert isinstance(out, s.OpCall) and out.op == "get_p" and out.arg == s.UNIT
    assert out.cont == s.Return(s.Var(out.var))
    out = translate_term(s.Assign("p", s.IntLit(3)))
    assert out.op == "set_p" and out.arg == s.IntLit(3)


def test_dlet_translation_shape():
    out = translate_term(s.DLet("p", s.IntLit(1), s.Deref("p")))
    assert isinstance(out, s.Do) and isinstance(out.first, s.Handle)
    assert out.first.handler == state_handler_for("p")
    assert out.rest == s.App(s.Var(out.var), s.IntLit(1))


def test_example_runs_to_two_after_translation():
    assert run(translate_term(fixture("dyn_example"))).outcome == Terminal(s.Return(s.IntLit(2)))


def test_signature_translation():
    assert translate_signature(GROUND, {"p": INT}) == {"get_p": (UNIT, INT), "set_p": (INT, UNIT)}
    assert signature_of(COARSE, {"p": arrow(UNIT, INT)}).ops == {"get_p", "set_p"}
    with pytest.raises(NonGroundSignature):
        translate_signature(GROUND, {"p": arrow(UNIT, INT)})


def test_type_translation():
    assert translate_type(GROUND, BOOL, {"p": INT}) == BOOL
    t = translate_type(GROUND, arrow(INT, BOOL), {"p": INT})
    assert t.cod.effects == Sig.of({"get_p": (UNIT, INT), "set_p": (INT, UNIT)})
    t = translate_type(COARSE, arrow(INT, BOOL), {"p": arrow(UNIT, INT)})
    assert t.cod.effects.ops == {"get_p", "set_p"}
    with pytest.raises(NonGroundSignature):
        translate_type(GROUND, arrow(INT, BOOL), {"p": arrow(UNIT, INT)})


def test_schemes_and_environments_translate_pointwise():
    sch = Scheme(("a",), arrow(TVar("a"), TVar("a")))
    out = translate_type(GROUND, sch, {"p": INT})
    assert out.quantified == ("a",) and out.body.cod.effects.ops == {"get_p", "set_p"}
    env = TypeEnv(frozenset(), (("f", sch),), (("x", INT),))
    tenv = translate_type(GROUND, env, {"p": INT})
    assert tenv.lookup("x") == INT and tenv.lookup("f") == out


@pytest.mark.parametrize("t", [INT, BOOL, UNIT, TVar("a")])
def test_ground_types_are_fixed(t):
    assert translate_type(GROUND, t, {"p": INT}) == t
    assert translate_type(COARSE, t, {"p": INT}) == t


def test_proposition_is_not_ground():
    params = {"p": parse_type(PROPOSITION_PARAMS["p"])}
    with pytest.raises(NonGroundSignature):
        translate_program(fixture("proposition"), params, GROUND)
    text = translate_program(fixture("proposition"), params, COARSE)
    prog = parse(text)
    assert prog.mode == "coarse"
    infer_closed(prog.core(), "coarse", prog.global_signature)


def test_translated_program_text_round_trips():
    text = translate_program(fixture("dyn_example"), {"p": INT}, GROUND)
    prog = parse(text)
    check_against(prog.core(), INT, signature_of(GROUND, {"p": INT}))
    assert run(prog.core()).outcome == Terminal(s.Return(s.IntLit(2)))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([s.IntLit(3), s.Var("z"),
                                               s.Lam("a", s.Deref("p"))]))
def test_translation_commutes_with_substitution(seed, v):
    c = TermGen(seed, dyn=True, open_vars=["x"]).comp(4, ["x"])
    lhs = translate_term(s.substitute(c, v, "x"))
    rhs = s.substitute(translate_term(c), translate_term(v), "x")
    assert s.alpha_eq(lhs, rhs)


def _translate_context(ctx, hole):
    for f in reversed(ctx):
        match f:
            case DoFrame(x, rest):
                hole = s.Do(x, hole, translate_term(rest))
            case DLetFrame(p, v):
                g = s.fresh("f")
                hole = s.Do(g, s.Handle(state_handler_for(p), hole), s.App(s.Var(g),
                                                                          translate_term(v)))
    return hole


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_context_lemma(seed):
    g = TermGen(seed, dyn=True)
    ctx = []
    for _ in range(g.rng.randint(0, 4)):
        if g.rng.random() < 0.5:
            ctx.append(DoFrame(g.name(), g.comp(2, [])))
        else:
            ctx.append(DLetFrame(g.rng.choice(["p", "q"]), g.value(1, [])))
    c = g.comp(3, [])
    assert s.alpha_eq(translate_term(plug(tuple(ctx), c)),
                      _translate_context(ctx, translate_term(c)))


def test_handler_forms_are_not_translated():
    with pytest.raises(ValueError):
        translate_term(s.op_call("op", s.UNIT))
