import pytest
from hypothesis import given
from hypothesis import strategies as st

from mca.order import BrokenImpl, Preorder, StatePred, TwoPoint, UpperSets, check_heyting_laws
from mca.report import Verdict

DIAMOND = Preorder("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


def test_two_point_laws():
    H = TwoPoint()
    assert len(H.elements()) == 2
    rep = check_heyting_laws(H)
    assert rep.ok and rep.verdict is Verdict.EXACT, rep.text()


def test_two_point_impl_table():
    H = TwoPoint()
    got = {(a, b): H.impl(a, b) for a in H.elements() for b in H.elements()}
    assert got == {(False, False): True, (False, True): True,
                   (True, False): False, (True, True): True}


def test_chain_of_two_has_three_upper_sets():
    H = UpperSets(Preorder.chain([0, 1]))
    assert sorted(map(sorted, H.elements())) == [[], [0, 1], [1]]
    assert check_heyting_laws(H).ok


def test_diamond_upper_sets():
    H = UpperSets(DIAMOND)
    # {}, {d}, {b,d}, {c,d}, {b,c,d}, {a,b,c,d}
    assert len(H.elements()) == 6
    assert check_heyting_laws(H).ok
    b, c = H.close("b"), H.close("c")
    assert H.meet(b, c) == frozenset("d")
    assert H.impl(b, c) == H.close("c")


def test_broken_impl_fails_residuation():
    rep = check_heyting_laws(BrokenImpl())
    assert not rep.ok
    assert rep.failing().startswith("meet(a,b) <= c iff a <= impl(b,c)")


def test_state_predicates():
    H = StatePred(range(4))
    assert len(H.elements()) == 5
    assert check_heyting_laws(H).ok
    ge2 = H.at_least(2)
    assert [H.holds(ge2, s) for s in range(6)] == [False, False, True, True, True, True]


def test_state_predicates_must_be_future_stable():
    H = StatePred(range(4))
    assert H.from_fn(lambda s: s >= 1) == H.at_least(1)
    with pytest.raises(ValueError):
        H.from_fn(lambda s: s == 1)


def test_unknown_cover_point():
    with pytest.raises(ValueError):
        Preorder("ab", [("a", "z")])


def test_preorder_is_transitively_closed():
    p = Preorder.chain("xyz")
    assert p.le("x", "z") and not p.le("z", "x")


@given(st.lists(st.booleans(), max_size=5))
def test_two_point_inf_and_sup(xs):
    H = TwoPoint()
    assert H.inf(xs) == all(xs)
    assert H.sup(xs) == any(xs)


@given(st.sets(st.sampled_from("abcd")), st.sets(st.sampled_from("abcd")))
def test_diamond_impl_is_residual(x, y):
    H = UpperSets(DIAMOND)
    u, v = H.close(x), H.close(y)
    for w in H.elements():
        assert H.leq(H.meet(w, u), v) == H.leq(w, H.impl(u, v))
