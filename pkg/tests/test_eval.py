from hypothesis import given, settings
from hypothesis import strategies as st

from hmeff import syntax as s
from hmeff.eval import (FuelExhausted, Stepped, Stuck, Terminal, TerminalOp, canonical_key,
                        evaluate, run, statesim, step)
from hmeff.fixtures import fixture, h_div_program
from hmeff.harness import GenConfig, gen_well_typed
from hmeff.pretty import format_trace

x, y = s.Var("x"), s.Var("y")


def test_do_return():
    assert step(s.Do("x", s.Return(s.TRUE), s.Return(x))) == Stepped(s.Return(s.TRUE))


def test_if_beta_and_add():
    assert step(s.If(s.FALSE, s.Return(s.IntLit(1)), s.Return(s.IntLit(2)))) == \
        Stepped(s.Return(s.IntLit(2)))
    assert step(s.App(s.Lam("x", s.Return(x)), s.UNIT)) == Stepped(s.Return(s.UNIT))
    assert step(s.PrimAdd(s.IntLit(2), s.IntLit(3))) == Stepped(s.Return(s.IntLit(5)))


def test_terminal_forms():
    assert isinstance(step(s.Return(s.UNIT)), Terminal)
    assert isinstance(step(s.op_call("op", s.UNIT)), TerminalOp)


def test_hoisting_chain():
    # do x1 <- (do x2 <- op((); y. return y) in return x2) in return x1
    c2, c1, c = s.Return(y), s.Return(s.Var("x2")), s.Return(s.Var("x1"))
    start = s.Do("x1", s.Do("x2", s.OpCall("op", s.UNIT, "y", c2), c1), c)
    mid = step(start).comp
    assert mid == s.Do("x1", s.OpCall("op", s.UNIT, "y", s.Do("x2", c2, c1)), c)
    end = step(mid).comp
    assert end == s.OpCall("op", s.UNIT, "y", s.Do("x1", s.Do("x2", c2, c1), c))
    assert isinstance(step(end), TerminalOp)


def test_hoisting_avoids_capture():
    # the rest mentions a free y, so the continuation binder must be renamed
    start = s.Do("x", s.OpCall("op", s.UNIT, "y", s.Return(y)), s.App(y, x))
    out = step(start).comp
    assert isinstance(out, s.OpCall) and out.var != "y"
    assert s.free_vars(out) == {"y"}


def test_handled_op_is_deep():
    h = fixture("H_C")
    c = s.Handle(h, s.OpCall("get", s.UNIT, "b", s.op_call("get", s.UNIT)))
    out = step(c).comp
    # k true  with  k = fun b -> with H_C handle ...
    assert isinstance(out, s.App) and isinstance(out.fn, s.Lam)
    assert isinstance(out.fn.body, s.Handle) and out.fn.body.handler == h


def test_unhandled_op_is_forwarded():
    h = fixture("H_C")
    c = s.Handle(h, s.OpCall("op", s.UNIT, "y", s.Return(y)))
    out = step(c).comp
    assert out == s.OpCall("op", s.UNIT, "y", s.Handle(h, s.Return(y)))


def test_return_clause():
    c = s.Handle(fixture("H_C"), s.Return(s.TRUE))
    assert step(c) == Stepped(s.Return(s.TRUE))


def test_stuck_cases():
    assert isinstance(step(s.App(s.TRUE, s.UNIT)), Stuck)
    assert isinstance(step(s.If(s.UNIT, s.Return(s.UNIT), s.Return(s.UNIT))), Stuck)
    assert isinstance(step(s.Handle(s.IntLit(1), s.Return(s.UNIT))), Stuck)
    assert isinstance(step(s.PrimAdd(s.TRUE, s.IntLit(1))), Stuck)
    assert isinstance(step(s.Deref("p")), Stuck)


def test_toggle_under_constant_handler():
    t = run(s.Handle(fixture("H_C"), fixture("T")))
    assert t.outcome == Terminal(s.Return(s.TRUE))
    assert t.fuel_used <= 20


def test_state_simulation_examples():
    assert evaluate(statesim(s.Return(s.IntLit(3)), s.TRUE)) == Terminal(s.Return(s.IntLit(3)))
    assert evaluate(statesim(fixture("T"), s.TRUE)) == Terminal(s.Return(s.TRUE))
    assert evaluate(statesim(fixture("T"), s.FALSE)) == Terminal(s.Return(s.FALSE))
    assert evaluate(statesim(s.op_call("set", s.IntLit(3)), s.IntLit(7))) == \
        Terminal(s.Return(s.UNIT))


def test_divergence_reports_repetition():
    t = run(h_div_program(), fuel=100, detect_cycles=True)
    assert isinstance(t.outcome, FuelExhausted)
    i, j = t.outcome.repeated_at
    assert j <= 100 and canonical_key(t.steps[i]) == canonical_key(t.steps[j])


def test_trace_elision_and_numbering():
    t = run(h_div_program(), fuel=50, cap=10)
    numbered = list(t.numbered())
    assert len(t.steps) == 11 and t.steps[5] is None
    assert [i for i, _ in numbered][:5] == [0, 1, 2, 3, 4]
    assert numbered[5] == (-1, None)
    assert numbered[-1][0] == 50
    text = format_trace(t)
    assert "…" in text or "..." in text


def test_canonical_key_is_alpha_invariant():
    a = s.Lam("x", s.OpCall("op", x, "y", s.Return(y)))
    b = s.Lam("u", s.OpCall("op", s.Var("u"), "v", s.Return(s.Var("v"))))
    c = s.Lam("u", s.OpCall("op", s.Var("u"), "v", s.Return(s.Var("u"))))
    assert canonical_key(a) == canonical_key(b) != canonical_key(c)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_step_is_deterministic_on_generated_programs(seed):
    c = gen_well_typed(GenConfig(seed=seed, max_depth=5))
    for _ in range(200):
        r1, r2 = step(c), step(c)
        assert type(r1) is type(r2)
        if not isinstance(r1, Stepped):
            assert not isinstance(r1, Stuck)
            break
        assert canonical_key(r1.comp) == canonical_key(r2.comp)
        c = r1.comp


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_resumption_reinstalls_handler(seed):
    # a clause that returns its continuation exposes it unchanged
    hv = s.HandlerVal(s.Handler("r", s.Return(s.Var("r")),
                                (s.OpClause("op", "a", "k", s.Return(s.Var("k"))),)))
    from randterms import TermGen
    body = TermGen(seed).comp(3, ["y"])
    out = step(s.Handle(hv, s.OpCall("op", s.UNIT, "y", body))).comp
    assert out == s.Return(s.Lam("y", s.Handle(hv, body)))
