import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magicilp.logic import (Clause, Hypothesis, Literal, Var, apply, canonicalize, check_const,
                            const_eq, format_clause, hypothesis_size, is_recursive, magic,
                            program_subsumes, theta_subsumes)
from magicilp.parsing import parse_clauses

from oracles import are_variants, brute_program_subsumes, brute_subsumes

A, B, C, D = (Var(i) for i in range(4))


def cl(text):
    (c,) = parse_clauses(text)
    return c


def hyp(text):
    return Hypothesis(parse_clauses(text))


# --- random clauses ----------------------------------------------------------

PREDS = [("p", 2), ("q", 1), ("r", 2)]


@st.composite
def clauses(draw, max_vars=3, max_body=3, consts=("a", 1), allow_magic=True):
    nv = draw(st.integers(1, max_vars))
    terms = st.one_of(st.sampled_from([Var(i) for i in range(nv)]), st.sampled_from(consts))
    head = Literal("f", (Var(0),))
    body = []
    for _ in range(draw(st.integers(0, max_body))):
        name, arity = draw(st.sampled_from(PREDS))
        lit = Literal(name, tuple(draw(terms) for _ in range(arity)))
        if lit not in body:  # a body is a set
            body.append(lit)
    c = Clause(head, body)
    if allow_magic:
        present = c.vars()
        for v in draw(st.lists(st.sampled_from(present), unique=True, max_size=2)):
            c = Clause(head, c.body + (magic(v),))
    return c


def shuffled_renaming(c: Clause, rng: random.Random) -> Clause:
    vs = c.vars()
    perm = list(range(10, 10 + len(vs)))
    rng.shuffle(perm)
    theta = {v: Var(i) for v, i in zip(vs, perm)}
    renamed = apply(c, theta)
    body = list(renamed.body)
    rng.shuffle(body)
    return Clause(renamed.head, body)


# --- canonicalize ------------------------------------------------------------

def test_canonicalize_renumbers_and_sorts():
    c = cl("f(X3):-tail(X3,X9),head(X9,X1).")
    assert format_clause(canonicalize(c)) == "f(A):-head(B,C),tail(A,B)."
    assert canonicalize(c).vars() == [A, B, C]


def test_canonicalize_puts_magic_last():
    c = Clause(Literal("f", (A,)), [magic(B), Literal("head", (A, B))])
    assert canonicalize(c).body[-1] == magic(B)


@given(clauses())
def test_canonicalize_idempotent(c):
    assert canonicalize(canonicalize(c)) == canonicalize(c)


@given(clauses(), st.integers(0, 10_000))
def test_canonicalize_ignores_names_and_order(c, seed):
    other = shuffled_renaming(c, random.Random(seed))
    assert canonicalize(other) == canonicalize(c)


@settings(max_examples=300)
@given(clauses(max_vars=4, max_body=2), clauses(max_vars=4, max_body=2))
def test_canonical_equality_matches_variant_oracle(c1, c2):
    assert (canonicalize(c1) == canonicalize(c2)) == are_variants(c1, c2)


# --- apply -------------------------------------------------------------------

def test_apply_binds_constant():
    c = Clause(Literal("p", (A, B)))
    assert apply(c, {A: "a"}).head == Literal("p", ("a", B))


def test_apply_empty_is_identity():
    c = cl("f(A):-head(A,B).")
    assert apply(c, {}) == c


def test_apply_is_simultaneous():
    c = Clause(Literal("p", (A, B)))
    assert apply(c, {A: B, B: A}).head == Literal("p", (B, A))


@given(clauses(), st.lists(st.sampled_from(["a", "b", 3]), min_size=3, max_size=3))
def test_apply_idempotent_on_ground_range(c, values):
    theta = dict(zip(c.vars(), values))
    once = apply(c, theta)
    assert apply(once, theta) == once


# --- theta subsumption -------------------------------------------------------

def test_magic_clause_subsumes_its_specialisation():
    assert theta_subsumes(cl("f(A):-head(A,B),@magic(B)."), cl("f(A):-head(A,B),@magic(B),odd(B)."))
    assert not theta_subsumes(cl("f(A):-head(A,B),@magic(B),odd(B)."), cl("f(A):-head(A,B),@magic(B)."))


def test_magic_literal_only_matches_magic_literal():
    assert not theta_subsumes(cl("f(A):-head(A,B),@magic(B)."), cl("f(A):-head(A,B),odd(B)."))
    assert theta_subsumes(cl("f(A):-head(A,B)."), cl("f(A):-head(A,B),@magic(B)."))


def test_subsumption_with_float_tolerance():
    c1 = Clause(Literal("f", (A,)), [Literal("mult", (A, 3.14159265, B))])
    c2 = Clause(Literal("f", (A,)), [Literal("mult", (A, 3.1415926500001, B))])
    c3 = Clause(Literal("f", (A,)), [Literal("mult", (A, 3.1416, B))])
    assert theta_subsumes(c1, c2)
    assert not theta_subsumes(c1, c3)
    assert theta_subsumes(c1, c3, eps=1e-3)


@given(clauses())
def test_subsumption_reflexive(c):
    assert theta_subsumes(c, c)


@settings(max_examples=400)
@given(clauses(max_body=3), clauses(max_body=3))
def test_subsumption_matches_brute_force(c1, c2):
    assert theta_subsumes(c1, c2) == brute_subsumes(c1, c2)


@settings(max_examples=200)
@given(clauses(max_body=2), clauses(max_body=2), clauses(max_body=2), st.integers(0, 99))
def test_subsumption_transitive(c1, c2, c3, seed):
    # bias the triple towards chains by specialising
    rng = random.Random(seed)
    c2 = Clause(c1.head, c1.body + c2.ordinary_body[:1])
    c3 = Clause(c2.head, c2.body + c3.ordinary_body[:1])
    c3 = shuffled_renaming(c3, rng)
    if theta_subsumes(c1, c2) and theta_subsumes(c2, c3):
        assert theta_subsumes(c1, c3)


@given(clauses(), st.integers(0, 10_000))
def test_subsumption_is_renaming_invariant(c, seed):
    other = shuffled_renaming(c, random.Random(seed))
    assert theta_subsumes(c, other) and theta_subsumes(other, c)


# --- program subsumption -----------------------------------------------------

def test_single_clause_generalises_its_specialisation():
    h0 = hyp("f(A):-head(A,B),@magic(B).")
    h1 = hyp("f(A):-head(A,B),@magic(B),odd(B).")
    assert program_subsumes(h0, h1)
    assert not program_subsumes(h1, h0)


def test_two_clause_direction():
    h0 = hyp("f(A):-head(A,B),@magic(B).")
    h2 = hyp("f(A):-head(A,B),@magic(B). f(A):-length(A,B),@magic(B).")
    assert program_subsumes(h2, h0)
    assert not program_subsumes(h0, h2)


@given(st.lists(clauses(max_body=2), min_size=1, max_size=2))
def test_program_subsumption_reflexive(cs):
    h = Hypothesis(cs)
    assert program_subsumes(h, h)


@settings(max_examples=200)
@given(st.lists(clauses(max_body=2), min_size=1, max_size=2),
       st.lists(clauses(max_body=2), min_size=1, max_size=2))
def test_program_subsumption_matches_oracle(c1, c2):
    h1, h2 = Hypothesis(c1), Hypothesis(c2)
    assert program_subsumes(h1, h2) == brute_program_subsumes(h1, h2)


# --- size and recursion ------------------------------------------------------

def test_size_ignores_magic():
    assert hypothesis_size(hyp("f(A):-length(A,B),@magic(B).")) == 2


def test_size_of_empty_hypothesis():
    assert hypothesis_size(Hypothesis()) == 0


def test_size_of_list_target():
    assert hypothesis_size(hyp("f(A):-head(A,7). f(A):-tail(A,B),f(B).")) == 5


@given(clauses(allow_magic=False), st.data())
def test_size_invariant_under_magic_and_canonical_form(c, data):
    h = Hypothesis([c])
    vs = c.vars()
    marked = data.draw(st.lists(st.sampled_from(vs), unique=True, max_size=len(vs)))
    with_magic = Clause(c.head, c.body + tuple(magic(v) for v in marked))
    assert hypothesis_size(Hypothesis([with_magic])) == hypothesis_size(h)
    assert canonicalize(with_magic).size() == c.size()
    stripped = Clause(with_magic.head, with_magic.ordinary_body)
    assert stripped.size() == with_magic.size()


def test_recursion_detection():
    assert is_recursive(hyp("f(A):-tail(A,B),f(B)."))
    assert not is_recursive(hyp("f(A):-head(A,B)."))
    assert is_recursive(hyp("f(A):-head(A,7). f(A):-tail(A,B),f(B)."))


# --- hypothesis sets ---------------------------------------------------------

def test_identical_magic_clauses_are_kept():
    h = hyp("f(A):-head(A,B),@magic(B). f(X):-head(X,Y),@magic(Y).")
    assert len(h) == 2


def test_identical_plain_clauses_collapse():
    assert len(hyp("f(A):-head(A,B). f(X):-head(X,Y).")) == 1


def test_clauses_ordered_by_size():
    h = hyp("f(A):-tail(A,B),f(B). f(A):-head(A,7).")
    assert [c.size() for c in h] == [2, 3]


# --- constants and clause invariants -----------------------------------------

def test_constant_validation():
    for bad in (float("nan"), float("inf"), True, None, [1]):
        with pytest.raises((TypeError, ValueError)):
            check_const(bad)
    assert check_const((1, "a", (2.5,))) == (1, "a", (2.5,))


def test_const_eq_tolerance_and_kinds():
    assert const_eq(2, 2.0000000001)
    assert not const_eq("a", "b")
    assert const_eq((1.0, "a"), (1.0000000001, "a"))
    assert not const_eq(1.0, "1")


def test_magic_variable_must_be_used():
    with pytest.raises(ValueError):
        Clause(Literal("f", (A,)), [Literal("head", (A, B)), magic(C)])
    with pytest.raises(ValueError):
        Clause(Literal("f", (A,)), [Literal("head", (A, B)), magic(B), magic(B)])
    with pytest.raises(ValueError):
        Clause(Literal("f", (A,)), [Literal("@magic", ("a",))])
