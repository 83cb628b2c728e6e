import pytest
from hypothesis import given
from hypothesis import strategies as st

from mca.algebra import apply, apply_all
from mca.effects import P1, P2, church, make_effect
from mca.frame import (Base, BotP, Conj, TopP, UImpl, builder_codes, check_consistency,
                       check_ef_laws, check_evidence, check_evidence_unsafe, check_tripos_laws,
                       ev_comp, ev_curry, ev_eval, ev_fst, ev_id, ev_pair, ev_snd, ev_uncurry,
                       make_core, prop_eval, reindex, tripos_leq, tuple_code)
from mca.gen import C_LOOP
from mca.report import Verdict
from mca.syntax import Prim

C1, C2, C3 = church(1), church(2), church(3)
partial = make_effect("partial")
power = make_effect("power")
CORE = make_core(partial)


def base(*true, default=False):
    return Base.of({c: True for c in true}, default)


def test_top_holds_everywhere():
    for c in (P1, C1, ev_id()):
        assert prop_eval(CORE, TopP(), c) is True
        assert prop_eval(CORE, BotP(), c) is False


def test_conjunction_at_a_tuple():
    e = tuple_code(C1, C2)
    assert apply(partial, e, P1) == {C1}
    assert prop_eval(CORE, Conj(base(C1), base(C2)), e) is True
    assert prop_eval(CORE, Conj(base(C2), base(C2)), e) is False


def test_uimpl_from_bottom_is_top():
    p = UImpl(base(), (TopP(),))
    for e in (C1, ev_id(), P2):
        assert prop_eval(CORE, p, e) is True


def test_uimpl_with_empty_family_is_top():
    assert prop_eval(CORE, UImpl(base(C1), ()), C2) is True


def test_builders_unfold():
    assert apply(partial, ev_id(), C1) == {C1}
    e1, e2 = ev_snd(), ev_id()
    c = tuple_code(C1, C2)
    assert apply(partial, ev_comp(e1, e2), c) == partial.bind(apply(partial, e1, c),
                                                             lambda s: apply(partial, e2, s))
    # the pair waits for a selector, which then picks a component
    pair = ev_pair(ev_id(), ev_snd())
    assert apply_all(partial, pair, [tuple_code(C1, C2), P1]) == {tuple_code(C1, C2)}
    assert apply_all(partial, pair, [tuple_code(C1, C2), P2]) == {C2}
    assert ev_eval() == ev_uncurry(ev_id())


def test_reflexivity_is_exact():
    for p in (base(C1), base(C1, C2), base(default=True)):
        r = check_evidence(CORE, p, ev_id(), p)
        assert r.ok
    assert check_evidence(CORE, base(C1), ev_id(), base(C1)).verdict is Verdict.EXACT


def test_top_to_bottom_fails_with_a_witness():
    r = check_evidence(CORE, TopP(), ev_id(), BotP())
    assert r.verdict is Verdict.FAIL
    assert r.witness is not None


def test_first_projection():
    p1, p2 = base(C1), base(C2)
    assert check_evidence(CORE, Conj(p1, p2), ev_fst(), p1).ok
    assert check_evidence(CORE, Conj(p1, p2), ev_snd(), p2).ok
    assert check_evidence(CORE, Conj(p1, p2), ev_fst(), p2).verdict is Verdict.FAIL


def test_bottom_default_base_is_never_sampled():
    for q in (base(C1), Conj(base(C1), base(C2)), TopP()):
        r = check_evidence(CORE, base(C1, C2), ev_id(), q)
        assert r.verdict in (Verdict.EXACT, Verdict.FAIL)


def test_transitivity_on_a_chain():
    p1, p2, p3 = base(C1), base(C1, C2), base(C1, C2, C3)
    assert check_evidence(CORE, p1, ev_id(), p2).ok
    assert check_evidence(CORE, p2, ev_id(), p3).ok
    assert check_evidence(CORE, p1, ev_comp(ev_id(), ev_id()), p3).ok


def test_curry_round_trip():
    p1, p2, q = base(C1), base(C2), base(C1)
    e = ev_fst()
    assert check_evidence(CORE, Conj(p1, p2), e, q).ok
    curried = ev_curry(e)
    assert check_evidence(CORE, p1, curried, UImpl(p2, (q,))).ok
    assert check_evidence(CORE, Conj(p1, p2), ev_uncurry(curried), q).ok


def test_separator_is_enforced():
    sep_core = make_core(power)
    with pytest.raises(ValueError):
        check_evidence(sep_core, TopP(), Prim("fail"), BotP())
    r = check_evidence_unsafe(sep_core, TopP(), Prim("fail"), BotP())
    assert r.verdict is Verdict.FAIL


def test_builders_stay_in_the_separator():
    for kind in ("partial", "power", "state", "reader", "cps"):
        core = make_core(make_effect(kind))
        assert all(core.separator.member(b) for b in builder_codes())


def test_more_probes_never_turn_a_failure_into_a_pass():
    p = Conj(base(C1), base(C2))
    r = check_evidence(CORE, p, ev_snd(), base(C1))
    assert r.verdict is Verdict.FAIL
    r2 = check_evidence(CORE, p, ev_snd(), base(C1), probes=[tuple_code(C2, C1), P1])
    assert r2.verdict is Verdict.FAIL


@pytest.mark.parametrize("kind,mod,sep", [
    ("partial", None, None), ("power", "angelic", None), ("reader", None, None),
])
def test_ef_laws_small(kind, mod, sep):
    core = make_core(make_effect(kind), mod, sep, fuel=500)
    rep = check_ef_laws(core, instances=15, seed=2)
    assert rep.ok, rep.text()
    assert len(rep.laws) >= 9


def test_consistency_of_the_partial_core():
    rep = check_consistency(CORE, 60)
    assert rep.ok, rep.text()


def test_inf_only_with_the_loop_is_inconsistent():
    core = make_core(partial, "inf-only", "all", fuel=200)
    rep = check_consistency(core, 60, members=[ev_id(), C_LOOP])
    assert not rep.ok
    assert "top <= bot" in rep.failing()


def test_cps_separators():
    cps = make_effect("cps")
    assert check_consistency(make_core(cps, None, "pl", fuel=500), 40).ok
    rep = check_consistency(make_core(cps, None, "all", fuel=500), 200)
    assert not rep.ok and "#k:" in rep.failing()


def test_tripos_examples():
    phi = {0: base(C1), 1: base(C2)}
    assert tripos_leq(CORE, phi, phi, ev_id()).ok
    psi = {0: base(C1, C2), 1: base(C2, C3)}
    chi = {0: base(C1, C2, C3), 1: base(C1, C2, C3)}
    assert tripos_leq(CORE, phi, chi, ev_comp(ev_id(), ev_id())).ok
    assert tripos_leq(CORE, psi, phi, ev_id()).verdict is Verdict.FAIL
    assert reindex({0: 0, 1: 1}, phi) == phi
    with pytest.raises(ValueError):
        tripos_leq(CORE, phi, {0: base(C1)}, ev_id())


def test_tripos_laws_small():
    rep = check_tripos_laws(CORE, instances=10)
    assert rep.ok, rep.text()


@given(st.dictionaries(st.integers(0, 3), st.integers(0, 2), min_size=1),
       st.dictionaries(st.integers(0, 3), st.integers(0, 3), min_size=1))
def test_reindex_composes(f, g):
    phi = {i: base(church(i)) for i in range(3)}
    g = {k: j for k, j in g.items() if j in f}
    fg = {k: f[j] for k, j in g.items()}
    assert reindex(fg, phi) == reindex(g, reindex(f, phi))
