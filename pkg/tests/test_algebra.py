import pytest
from hypothesis import given
from hypothesis import strategies as st

from mca.algebra import (Budget, FuelExhausted, I, K, S, Stuck, apply, apply_all, b_comb,
                         bracket, check_bracket, check_mca_laws, check_monad_laws,
                         check_sk_axioms, evaluate, k1, nary_k, nary_s, s1, s2)
from mca.effects import P1, P2, church, make_effect
from mca.gen import C_LOOP, Gen
from mca.syntax import App, Closure, Lit, Prim, ScopeError, Var, apps, parse, show

from strategies import closures, codes

partial = make_effect("partial")
power = make_effect("power")
C = church(2)


def test_partial_application_law():
    assert apply(partial, Closure(1, Var(0)), C) == {Closure(0, Lit(C))}


def test_identity_body_returns_argument():
    assert apply(partial, Closure(0, Var(0)), C) == {C}


def test_flip_under_power():
    assert apply(power, Prim("flip"), C) == {P1, P2}


def test_eval_literal():
    assert evaluate(partial, Lit(C)) == {C}


def test_eval_identity_application():
    assert evaluate(partial, parse("<0|0> <1|0>")) == {Closure(1, Var(0))}


@pytest.mark.parametrize("fuel", [1, 10, 1000])
def test_loop_exhausts_fuel(fuel):
    with pytest.raises(FuelExhausted):
        apply(partial, C_LOOP, C, fuel)


def test_timeout_as_bottom_reads_exhaustion_as_empty():
    eff = make_effect("partial", timeout_as_bottom=True)
    assert apply(eff, C_LOOP, C, 50) == frozenset()


def test_fuel_counts_applications():
    b = Budget(2)
    b.tick()
    b.tick()
    with pytest.raises(FuelExhausted):
        b.tick()
    # one application of the identity needs exactly one unit
    assert evaluate(partial, parse("<0|0> <1|0>"), fuel=1) == {P1}
    with pytest.raises(FuelExhausted):
        evaluate(partial, parse("<0|0> (<0|0> <1|0>)"), fuel=1)


def test_primitive_without_meaning_is_stuck():
    with pytest.raises(Stuck):
        apply(partial, Prim("flip"), C)


def test_open_terms_are_rejected():
    with pytest.raises(ScopeError):
        evaluate(partial, Var(0))


def test_sk_equations():
    c1, c2, c3 = P1, P2, C
    assert apply(partial, K, c1) == {Closure(0, Lit(c1))} == {k1(c1)}
    assert apply(partial, k1(c1), c2) == {c1}
    assert apply(partial, S, c1) == {s1(c1)}
    assert apply(partial, s1(c1), c2) == {s2(c1, c2)}
    direct = evaluate(partial, App(App(Lit(c1), Lit(c3)), App(Lit(c2), Lit(c3))))
    assert apply(partial, s2(c1, c2), c3) == direct


def test_s1_shape():
    c = church(1)
    assert s1(c) == Closure(1, App(App(Lit(c), Var(1)), App(Var(0), Var(1))))


def test_nary_k():
    assert nary_k(1) == Lit(K)
    assert show(nary_k(0), sk=True) == "S K K"
    skk = evaluate(partial, nary_k(0))
    (code,) = skk
    assert apply(partial, code, C) == {C}
    # K_3 takes four arguments and returns the first
    assert evaluate(partial, apps(nary_k(3), *(Lit(c) for c in (C, P1, P2, I)))) == {C}


def test_b_combinator():
    # B f g x = f (g x)
    f, g = Closure(0, App(Var(0), Lit(P1))), Closure(0, Var(0))
    x = P2
    got = evaluate(partial, apps(b_comb(), Lit(f), Lit(g), Lit(x)))
    assert got == evaluate(partial, App(Lit(f), App(Lit(g), Lit(x))))


@given(codes(depth=2), codes(depth=2), codes(depth=1), codes(depth=1))
def test_nary_s2(f, g, x, y):
    lhs = apps(nary_s(2), Lit(f), Lit(g), Lit(x), Lit(y))
    rhs = App(apps(Lit(f), Lit(x), Lit(y)), apps(Lit(g), Lit(x), Lit(y)))
    try:
        expect = evaluate(partial, rhs, 300)
    except FuelExhausted:
        return
    assert evaluate(partial, lhs, 6000) == expect


def test_bracket_rows():
    assert show(bracket(0, Var(0)), sk=True) == "S K K"
    assert show(bracket(0, Lit(C)), sk=True) == f"K {show(Lit(C))}"
    assert show(bracket(1, Var(0)), sk=True) == "K"
    with pytest.raises(ScopeError):
        bracket(0, Var(1))


def test_bracket_of_s_body_matches_closure():
    e = parse("<2|0 2 (1 2)>").code.body
    g = Gen(7)
    for _ in range(20):
        args = g.codes(3, depth=2)
        try:
            expect = apply_all(partial, Closure(2, e), args, 300)
        except FuelExhausted:
            continue
        assert evaluate(partial, apps(bracket(2, e), *(Lit(a) for a in args)), 6000) == expect


def test_law_suites_pass_on_small_samples():
    g = Gen(1, prims=["flip", "fail"])
    clos = [g.closure(4, 2) for _ in range(40)]
    args = g.codes(3, 2)
    for eff in (partial, power):
        assert check_mca_laws(eff, clos if eff is power else
                              [Gen(1).closure(4, 2) for _ in range(40)], args, 300).ok
    triples = [tuple(g.codes(3, 2)) for _ in range(30)]
    assert check_sk_axioms(power, triples, 300).ok
    assert check_bracket(partial, [Gen(2).closure(3, 2) for _ in range(20)], [args], 300).ok


def test_mca_law_checker_catches_a_broken_evaluator(monkeypatch):
    import mca.algebra as alg

    real = alg._apply

    def lazy_apply(eff, f, a, budget):
        # ignores the argument of a partial application
        if isinstance(f, Closure) and f.n > 0:
            budget.tick()
            return eff.ret(f)
        return real(eff, f, a, budget)
    monkeypatch.setattr(alg, "_apply", lazy_apply)
    rep = check_mca_laws(partial, [Closure(1, Var(0))], [P2])
    assert not rep.ok
    assert "<1|0> . <1|1>" in rep.failing()


@pytest.mark.parametrize("kind", ["partial", "power", "state", "reader", "cps"])
def test_monad_laws(kind):
    eff = make_effect(kind)
    g = Gen(3, prims=sorted(eff.prims))
    cs = [c for c in g.codes(8, 2)]
    fs = [g.code() for _ in range(3)]
    comps = []
    for f, a in zip(cs, reversed(cs)):
        try:
            m = apply(eff, f, a, 40)
            eff.results(m)
            comps.append(m)
        except (FuelExhausted, Stuck):
            pass
    kl = [lambda x, f=f: apply(eff, f, x, 40) for f in fs]
    rep = check_monad_laws(eff, comps, cs, kl)
    assert rep.ok, rep.text()
