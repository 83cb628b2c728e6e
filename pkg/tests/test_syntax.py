import pytest
from hypothesis import given
from hypothesis import strategies as st

from mca.algebra import K, S
from mca.syntax import (App, Closure, Lit, ParseError, Prim, ScopeError, Var, brief, parse,
                        scope_check, show, show_code, subst)

from strategies import closures, exprs

C = Closure(1, Var(1))


def test_parse_variable():
    assert parse("0") == Var(0)


def test_parse_closure_literal():
    assert parse("<1|0>") == Lit(Closure(1, Var(0)))


def test_parse_s_shape():
    body = App(App(Var(0), Var(2)), App(Var(1), Var(2)))
    assert parse("<2|(0 2)(1 2)>") == Lit(Closure(2, body))


def test_application_is_left_associative():
    assert parse("0 1 2") == App(App(Var(0), Var(1)), Var(2))
    assert parse("0 (1 2)") == App(Var(0), App(Var(1), Var(2)))


def test_primitives_and_sugar():
    assert parse("#flip") == Lit(Prim("flip"))
    assert parse("S K") == App(Lit(S), Lit(K))
    assert parse("S") == Lit(Closure(2, App(App(Var(0), Var(2)), App(Var(1), Var(2)))))


@pytest.mark.parametrize("text", ["", "(", "<1|0", "<|0>", "0 )", "#nope", "<0|1>", "#k:3", "x"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse("0 )")
    assert info.value.pos == 2


def test_substitution_table():
    assert subst(Var(0), C) == Lit(C)
    assert subst(Var(3), C) == Var(2)
    assert subst(App(Var(0), Var(1)), C) == App(Lit(C), Var(0))


def test_substitution_leaves_literals_alone():
    inner = Closure(0, Var(0))
    assert subst(Lit(inner), C) == Lit(inner)


def test_scope_check():
    assert scope_check(Var(0), 1)
    assert not scope_check(Var(1), 1)
    assert scope_check(App(Var(2), Lit(C)), 3)


def test_closure_body_out_of_scope():
    with pytest.raises(ScopeError):
        Closure(0, Var(1))


def test_printing():
    assert show(Var(0)) == "0"
    assert show(Lit(Closure(0, App(Var(0), Var(0))))) == "<0|0 0>"
    assert show(parse("((0 1) 2) (3 4)")) == "0 1 2 (3 4)"
    assert show_code(S, sk=True) == "S"
    assert show_code(K, sk=True) == "K"
    assert show_code(Prim("k", 4)) == "#k:4"


def test_brief_truncates():
    big = Closure(0, Var(0))
    for _ in range(60):
        big = Closure(0, App(Lit(big), Lit(big)))
    text = brief(big, limit=50)
    assert text.endswith("...") and len(text) <= 53


def test_prim_equality_ignores_payload():
    assert Prim("k", 3, "a") == Prim("k", 3, "b")
    assert Prim("k", 3) != Prim("k", 4)


def test_shared_subterms_compare_quickly():
    a, b = Closure(0, Var(0)), Closure(0, Var(0))
    for _ in range(200):
        a = Closure(0, App(Lit(a), Lit(a)))
        b = Closure(0, App(Lit(b), Lit(b)))
    assert a == b and a is not b


@given(exprs(3))
def test_show_parse_round_trip(e):
    assert parse(show(e)) == e


@given(closures(depth=3))
def test_code_round_trip(c):
    assert parse(show_code(c)) == Lit(c)


@given(exprs(3), closures(depth=1))
def test_subst_lowers_scope(e, c):
    assert scope_check(subst(e, c), 2)


@given(st.integers(1, 50), closures(depth=1))
def test_subst_shifts_every_higher_level(i, c):
    assert subst(Var(i), c) == Var(i - 1)
