import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magicilp.engine import make_interpreter
from magicilp.interpreter import Interpreter, ResourceBudget
from magicilp.logic import FRESH, Hypothesis, Literal, hypothesis_size
from magicilp.magic import evaluate, harvest, instantiate, lift, lift_any
from magicilp.parsing import parse_atom, parse_clauses
from magicilp.taskio import render_program

from oracles import are_variants, covers, harvest_case, harvest_discrepancies

LENGTH = Hypothesis(parse_clauses("f(A):-length(A,B),@magic(B)."))
HEAD = Hypothesis(parse_clauses("f(A):-head(A,B),@magic(B)."))
SINGLE = Hypothesis(parse_clauses("f(A):-head(A,B),tail(A,C),empty(C),@magic(B)."))
LIST_SHAPE = Hypothesis(parse_clauses("f(A):-head(A,B),@magic(B). f(A):-tail(A,B),f(B)."))


def atoms(*texts):
    return [parse_atom(t) for t in texts]


def run_harvest(h, pos, cap=10_000):
    return harvest(lift(h), Interpreter(), pos, cap)


# --- lift --------------------------------------------------------------------

def test_lift_single_magic():
    (c,) = lift(LENGTH).clauses
    assert are_variants(c, parse_clauses("f(A,B):-length(A,B).")[0])


def test_lift_threads_positions_through_recursion():
    h = Hypothesis(parse_clauses("f(A):-length(A,B),@magic(B). f(A):-head(A,D),tail(A,C),f(C),@magic(D)."))
    lh = lift(h)
    want = parse_clauses("f(A,B,D):-length(A,B). f(A,B,D):-head(A,D),tail(A,C),f(C,B,D).")
    assert lh.k == 2
    assert all(are_variants(x, y) for x, y in zip(lh.clauses, want))


def test_lift_needs_magic():
    with pytest.raises(ValueError):
        lift(Hypothesis(parse_clauses("f(A):-head(A,7).")))
    assert lift_any(Hypothesis(parse_clauses("f(A):-head(A,7).")) ).k == 0


# --- harvest -----------------------------------------------------------------

def test_harvest_lengths():
    assert run_harvest(LENGTH, atoms("f([a,e])", "f([])")).bindings == [(0,), (2,)]


def test_harvest_heads():
    assert run_harvest(HEAD, atoms("f([b,a])", "f([c,a,e])")).bindings == [("b",), ("c",)]


@pytest.mark.parametrize("n", [2, 4, 8])
def test_two_member_clauses_give_quadratic_bindings(n):
    h = Hypothesis(parse_clauses("f(A):-member(A,B),@magic(B). f(A):-member(A,C),@magic(C)."))
    assert len(h) == 2
    pos = [Literal("f", (tuple(f"e{i}" for i in range(n)),))]
    got = run_harvest(h, pos).bindings
    # (x, any) and (any, x): n(n+1) each, sharing the n*n harvested pairs
    assert len(got) == n * n + 2 * n


def test_harvest_truncates_at_cap():
    h = Hypothesis(parse_clauses("f(A):-member(A,B),@magic(B). f(A):-member(A,C),@magic(C)."))
    res = run_harvest(h, [Literal("f", (tuple(range(10)),))], cap=7)
    assert res.truncated and len(res.bindings) == 7


def test_harvest_marks_free_positions_fresh():
    h = Hypothesis(parse_clauses("f(A):-head(A,B),@magic(B). f(A):-last(A,C),@magic(C)."))
    got = run_harvest(h, atoms("f([a,b])")).bindings
    assert ("a", FRESH) in got and (FRESH, "b") in got and ("a", "b") in got


# --- instantiate ---------------------------------------------------------------

def test_instantiate_length():
    assert render_program(instantiate(LENGTH, (2,))) == "f(A):-length(A,2).\n"
    assert render_program(instantiate(LENGTH, (0,))) == "f(A):-length(A,0).\n"


def test_instantiate_magic_free_is_identity():
    h = Hypothesis(parse_clauses("f(A):-head(A,7)."))
    assert instantiate(h, ()) == h


def test_instantiate_arity_mismatch():
    with pytest.raises(ValueError):
        instantiate(LENGTH, (1, 2))


def test_instantiation_keeps_size():
    assert hypothesis_size(instantiate(LIST_SHAPE, (7,))) == hypothesis_size(LIST_SHAPE) == 5


# --- evaluate ------------------------------------------------------------------

def test_head_bindings_each_cover_one_of_each():
    r = evaluate(HEAD, Interpreter(), atoms("f([b,a])", "f([c,a,e])"), atoms("f([b])", "f([c])"))
    assert r.bindings == [("b",), ("c",)]
    assert r.pos_cov == [0b01, 0b10] and r.neg_cov == [0b01, 0b10]
    assert r.solutions() == []


def test_single_element_hypothesis_has_no_relevant_binding():
    r = evaluate(SINGLE, Interpreter(), atoms("f([b,c])", "f([f,g,c])"), [])
    assert r.bindings == [] and not r.truncated


def test_list_shape_finds_seven():
    pos = atoms("f([a,b,c,7,8,k,f])", "f([7])", "f([x,y,7])")
    neg = atoms("f([a,b,c,p,r,w,q,9])", "f([])")
    r = evaluate(LIST_SHAPE, Interpreter(), pos, neg)
    assert [r.bindings[i] for i in r.solutions()] == [(7,)]


def test_magic_free_hypothesis_is_one_row():
    h = Hypothesis(parse_clauses("f(A):-head(A,7)."))
    r = evaluate(h, Interpreter(), atoms("f([7])", "f([1])"), atoms("f([7,1])"))
    assert r.bindings == [()] and r.pos_cov == [0b01] and r.neg_cov == [0b1]


def test_magic_free_hypothesis_covering_nothing():
    h = Hypothesis(parse_clauses("f(A):-head(A,7)."))
    assert evaluate(h, Interpreter(), atoms("f([1])"), []).bindings == []


def test_float_bindings_collapse_within_tolerance():
    h = Hypothesis(parse_clauses("area(A,B):-square(A,C),mult(C,D,B),@magic(D)."))
    pos = [Literal("area", (1.0, 3.14159265)), Literal("area", (2.0, 12.5663706))]
    r = evaluate(h, Interpreter(epsilon=1e-6), pos, [])
    assert len(r.bindings) == 1 and r.solutions() == [0]


# --- against brute-force instantiation ----------------------------------------

@pytest.mark.parametrize("seed", range(12))
def test_harvest_matches_brute_force(seed):
    assert harvest_discrepancies(seed) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(1000, 10**6))
def test_relevance_and_coherence(seed):
    task, hyps = harvest_case(seed, n_hyps=3)
    interp = make_interpreter(task)
    for h in hyps:
        r = evaluate(h, interp, task.pos, task.neg)
        for b, p, n in r.rows():
            assert p != 0
            if FRESH in b:
                continue
            inst = instantiate(h, b)
            assert covers(interp, inst, task.pos) == p
            assert covers(interp, inst, task.neg) == n


def test_budget_exhaustion_is_reported():
    h = Hypothesis(parse_clauses("f(A):-succ(A,B),f(B). f(A):-empty(A),@magic(A)."))
    # the descent never reaches a list, so the budget is what stops it
    r = evaluate(h, Interpreter(), [Literal("f", (1,))], [], budget=ResourceBudget(max_resolution_steps=50))
    assert r.truncated or r.budget_exceeded
