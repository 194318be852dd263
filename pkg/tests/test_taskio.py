import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magicilp.logic import Clause, Hypothesis, Literal, Var
from magicilp.parsing import ParseError
from magicilp.taskio import (EngineConfig, LearnResult, MagicSetting, PredDecl, Stats,
                             ValidationError, build_task, parse_bias, parse_examples, parse_facts,
                             parse_program, parse_task, render_program, write_stats, write_task)
from magicilp.tasks import FAMILIES, gen_task

LIST_BIAS = """\
head_pred(f,1).
body_pred(head,2).
body_pred(tail,2).
type(f,(list)).
type(head,(list,element)).
type(tail,(list,list)).
magic_type(element).
enable_recursion.
max_vars(3).
"""


def test_declaration_with_types():
    b = parse_bias("head_pred(f,1).\nbody_pred(distance,3).\ntype(distance,(pos,pos,int)).\n")
    assert b.decl("distance", 3) == PredDecl("distance", 3, ("pos", "pos", "int"), None)


def test_magic_type_gives_types_setting():
    b = parse_bias(LIST_BIAS)
    assert b.magic_setting == MagicSetting("types", frozenset({"element"}))
    assert b.enable_recursion and b.max_vars == 3 and b.max_body == 6


def test_no_magic_directive_means_all():
    assert parse_bias("head_pred(f,1).\nbody_pred(q,1).\n").magic_setting.kind == "all"


def test_defaults():
    b = parse_bias("head_pred(f,1).")
    assert (b.max_vars, b.max_body, b.max_clauses, b.max_magic) == (6, 6, 2, 4)
    assert not b.enable_recursion


def test_magic_arg_setting_and_builtins():
    b = parse_bias("head_pred(f,2).\nbuiltin(add,3).\nmagic_arg(add,2).\ndirection(add,(in,in,out)).\n")
    assert b.magic_setting == MagicSetting("arguments", frozenset({("add", 2)}))
    assert ("add", 3) in b.builtins_enabled
    assert b.decl("add", 3).directions == ("in", "in", "out")


@pytest.mark.parametrize("text", [
    "head_pred(f,1).\nbody_pred(q,1).\ntype(q,(t)).\nmagic_type(t).\nmagic_arg(q,1).\n",
    "head_pred(f,1).\nmagic_type(nowhere).\n",
    "head_pred(f,1).\nbody_pred(q,1).\nmagic_arg(q,2).\n",
    "head_pred(f,1).\nmagic_arg(r,1).\n",
    "head_pred(f,1).\nhead_pred(g,1).\n",
    "body_pred(q,1).\n",
    "head_pred(f,1).\ntype(f,(a,b)).\n",
    "head_pred(f,1).\ndirection(f,(sideways)).\n",
    "head_pred(f,1).\nbogus(1).\n",
    "head_pred(f,1).\nbuiltin(nosuch,2).\n",
    "head_pred(f,1).\ntype(g,(a)).\n",
])
def test_invalid_bias_rejected(text):
    with pytest.raises(ValidationError):
        parse_bias(text)


def test_bias_syntax_error_has_line():
    with pytest.raises(ParseError) as e:
        parse_bias("head_pred(f,1).\nmax_vars(3 4).\n")
    assert e.value.line == 2


def test_list_example_parses():
    pos, neg = parse_examples("pos(f([a,b,c,7,8,k,f])).\nneg(f([a,b,c,p,r,w,q,9])).\n")
    assert pos == [Literal("f", (("a", "b", "c", 7, 8, "k", "f"),))]
    assert len(neg) == 1


def test_examples_must_be_wrapped():
    with pytest.raises(ValidationError):
        parse_examples("f(a).\n")


def test_background_must_be_ground_facts():
    with pytest.raises(ValidationError):
        parse_facts("p(a):-q(a).\n")
    with pytest.raises(ParseError):
        parse_facts("p(X).\n")


def _bias():
    return parse_bias(LIST_BIAS)


def test_build_task_checks_examples():
    f = lambda *a: Literal("f", a)
    with pytest.raises(ValidationError):
        build_task(_bias(), [], [Literal("g", ((),))], [])
    with pytest.raises(ValidationError):
        build_task(_bias(), [], [f((1,))], [f((1,))])
    with pytest.raises(ValidationError):
        build_task(_bias(), [f((1,))], [f((2,))], [])
    task = build_task(_bias(), [], [f((1,)), f((1,))], [f((2,))])
    assert task.pos == [f((1,))]


def test_overlap_uses_constant_normalisation():
    with pytest.raises(ValidationError):
        build_task(_bias(), [], [Literal("f", (1,))], [Literal("f", (1.0,))])


def test_config_validation():
    for kw in ({"timeout": 0}, {"epsilon": 0}, {"max_instantiations": 0}):
        with pytest.raises(ValueError):
            EngineConfig(**kw)


# --- rendering ---------------------------------------------------------------

def test_render_list_target():
    h = parse_program("f(A):-tail(A,B),f(B).\nf(A):-head(A,7).\n")
    assert render_program(h) == "f(A):-head(A,7).\nf(A):-tail(A,B),f(B).\n"


def test_render_empty_and_magic():
    assert render_program(Hypothesis()) == ""
    with pytest.raises(ValueError):
        render_program(Hypothesis([Clause(Literal("f", (Var(0),)),
                                          [Literal("head", (Var(0), Var(1))), Literal("@magic", (Var(1),))])]))
    with pytest.raises(ValidationError):
        parse_program("f(A):-head(A,B),@magic(B).")


V = [Var(i) for i in range(3)]
terms = st.one_of(st.sampled_from(V), st.sampled_from([7, -2, 0.5, "a", "Q x", (1, "b")]))
lits = st.builds(lambda n, args: Literal(n, tuple(args[:{"p": 2, "q": 1, "f": 1}[n]])),
                 st.sampled_from(["p", "q", "f"]), st.lists(terms, min_size=2, max_size=2))
programs = st.lists(st.builds(lambda b: Clause(Literal("f", (V[0],)), b),
                              st.lists(lits, max_size=3, unique=True)), max_size=3)


@settings(max_examples=100)
@given(programs)
def test_render_parse_render_fixed_point(cs):
    text = render_program(Hypothesis(cs))
    assert render_program(parse_program(text)) == text


# --- task files --------------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES)
def test_task_round_trip(family, tmp_path):
    task = gen_task(family, seed=3).task
    write_task(task, tmp_path)
    back = parse_task(tmp_path)
    assert back.bias == task.bias
    assert back.pos == task.pos and back.neg == task.neg
    assert set(back.facts.atoms()) == set(task.facts.atoms())


def test_parse_task_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_task(tmp_path / "nope")
    (tmp_path / "bias.pl").write_text("head_pred(f,1).\n")
    with pytest.raises(FileNotFoundError):
        parse_task(tmp_path)


def test_stats_document(tmp_path):
    r = LearnResult(parse_program("f(A):-head(A,7)."), 2, "solved", Stats(candidates_generated=3))
    path = tmp_path / "s.json"
    write_stats(r, path)
    doc = json.loads(path.read_text())
    assert list(doc) == ["program", "size", "status", "candidates_generated", "candidates_tested",
                         "instantiations_tested", "constraints_specialisation",
                         "constraints_generalisation", "constraints_redundancy",
                         "constraints_banish", "elapsed_ms", "budget_exceeded_count"]
    assert doc["program"] == "f(A):-head(A,7).\n" and doc["candidates_generated"] == 3


def test_stats_write_error_surfaces(tmp_path):
    r = LearnResult(None, 0, "exhausted", Stats())
    with pytest.raises(OSError):
        write_stats(r, tmp_path / "missing" / "s.json")
