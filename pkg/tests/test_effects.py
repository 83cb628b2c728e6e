import pytest
from hypothesis import given
from hypothesis import strategies as st

from mca.algebra import FuelExhausted, apply, evaluate
from mca.effects import (DEFAULT_POLE, P1, P2, Cont, Param, church, church_value, const, halt,
                         make_effect)
from mca.machine import run
from mca.syntax import App, Closure, Lit, Prim, Var, parse

from strategies import codes

C = church(1)


def test_flip():
    power = make_effect("power")
    assert apply(power, Prim("flip"), C) == {P1, P2}
    assert apply(power, Prim("flip"), C) == apply(power, Prim("flip"), P1)


def test_flip_branches_select_arguments():
    power = make_effect("power")
    a, b = church(3), church(0)
    got = evaluate(power, App(App(App(Lit(Prim("flip")), Lit(C)), Lit(a)), Lit(b)))
    assert got == {a, b}


def test_fail():
    power = make_effect("power")
    assert apply(power, Prim("fail"), C) == frozenset()
    assert power.bind(apply(power, Prim("fail"), C), lambda x: power.ret(x)) == frozenset()


def test_fail_not_in_default_power_separator():
    from mca.modality import make_separator
    assert not make_separator(make_effect("power"), None).member(Prim("fail"))
    assert make_separator(make_effect("power"), "all").member(Prim("fail"))


def test_get_and_inc():
    state = make_effect("state")
    assert apply(state, Prim("get"), C)(3) == {(3, church(3))}
    assert apply(state, Prim("inc"), C)(0) == {(1, C)}


def test_counter_demo():
    state = make_effect("state")
    m = evaluate(state, parse("<0|#get 0> (#inc (#inc <0|0>))"))
    assert m(0) == {(2, church(2))}


def test_increasing_invariant():
    from mca.gen import Gen
    state = make_effect("state")
    g = Gen(5, prims=["get", "inc"])
    seen = 0
    for _ in range(200):
        try:
            m = apply(state, g.code(), g.code(), 300)
            assert state.increasing(m)
            seen += 1
        except FuelExhausted:
            pass
    assert seen > 100


def test_state_has_no_ceiling():
    state = make_effect("state", probe_states=[0])
    term = "<0|#get 0> " + "(#inc " * 12 + "<0|0>" + ")" * 12
    assert evaluate(state, parse(term))(0) == {(12, church(12))}


def test_church_numerals():
    assert church(0) == Closure(1, Var(1))
    assert church_value(church(5)) == 5
    assert church_value(P1) is None
    # 2 succ zero with succ = <0|#inc 0> counts two increments
    state = make_effect("state")
    m = evaluate(state, App(App(Lit(church(2)), Lit(Closure(0, App(Lit(Prim("inc")), Var(0))))), Lit(P1)))
    assert m(0) == {(2, P1)}


def test_search():
    p = Param.of("marks-c", {C: 1}, 0)
    reader = make_effect("reader", params=[p])
    assert apply(reader, Prim("search"), church(0))(0) == {P1}
    assert apply(reader, Prim("search"), C)(0) == {P2}


def test_search_fibers_are_subsingletons():
    reader = make_effect("reader")
    m = apply(reader, Prim("search"), C)
    assert all(len(m(i)) <= 1 for i in reader.probes())


def test_cc_passes_the_captured_continuation():
    cps = make_effect("cps")
    m = apply(cps, Prim("cc"), Closure(0, Var(0)))
    got = m(halt)
    assert isinstance(got, Prim) and got.kind == "k"
    assert got.payload is halt


def test_k_code_ignores_the_current_continuation():
    cps = make_effect("cps")
    u = const("abort")
    ku = Prim("k", 7, u)
    assert apply(cps, ku, C)(const("ok")) == "abort"
    assert apply(cps, ku, C)(halt) == "abort"


def test_escape_matches_the_machine():
    cps = make_effect("cps")
    e = parse("#cc <0|0 <1|0> <1|1>>")
    assert evaluate(cps, e)(halt) == run(e).code
    assert run(e).code == parse("<1|0>").code


def test_cps_pole_defaults():
    cps = make_effect("cps")
    assert cps.pole == DEFAULT_POLE
    assert [k.name for k in cps.dictionary] == ["halt", "const ok", "const abort"]


def test_dictionary_tables():
    k = Cont("t", ((C, "ok"),), "abort")
    assert k(C) == "ok" and k(P1) == "abort"
    assert Cont("h")(P1) == P1


@given(codes(depth=2))
def test_flip_ignores_argument(c):
    power = make_effect("power")
    assert apply(power, Prim("flip"), c) == {P1, P2}


@given(st.integers(0, 30))
def test_church_round_trip(n):
    assert church_value(church(n)) == n


@given(st.integers(0, 8), codes(depth=1))
def test_get_reports_the_state(n, c):
    state = make_effect("state")
    assert apply(state, Prim("get"), c)(n) == {(n, church(n))}
