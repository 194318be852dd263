"""Seeded generators for the synthetic benchmark families.

Every generator draws from its own ``random.Random(seed)`` and returns the
training task together with fresh held-out examples and the hidden truth
used to build them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .logic import Literal
from .taskio import Bias, EngineConfig, MagicSetting, PredDecl, TaskSpec, build_task

FAMILIES = ("list", "powerof2", "append", "pi", "sumk", "md_mini")


@dataclass
class GeneratedTask:
    family: str
    params: dict
    seed: int
    task: TaskSpec
    test_pos: list
    test_neg: list
    truth: dict = field(default_factory=dict)


def _params(given: dict, defaults: dict) -> dict:
    unknown = set(given) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    out = dict(defaults)
    for k, v in given.items():
        if type(v) is not type(defaults[k]) and not (type(defaults[k]) is float and type(v) is int):
            raise ValueError(f"parameter {k} expects {type(defaults[k]).__name__}")
        out[k] = v
    return out


def _positive(p: dict, *names):
    for n in names:
        if p[n] <= 0:
            raise ValueError(f"parameter {n} must be positive")


def _decl(name, types, dirs=None):
    return PredDecl(name, len(types), tuple(types), tuple(dirs) if dirs else None)


# --- list: some element equals 7 ---------------------------------------------

def _gen_list(p, rng):
    _positive(p, "pool", "length", "pos", "neg", "test")
    if p["pool"] < 8:
        raise ValueError("pool must contain the constant 7 and at least one other constant")
    others = [c for c in range(p["pool"]) if c != 7]

    def positive():
        xs = [rng.choice(others) for _ in range(p["length"])]
        xs[rng.randrange(p["length"])] = 7
        return Literal("f", (tuple(xs),))

    def negative():
        return Literal("f", (tuple(rng.choice(others) for _ in range(p["length"])),))

    bias = Bias(
        head_preds=(_decl("f", ["list"]),),
        body_preds=(_decl("empty", ["list"]), _decl("geq", ["int", "int"]),
                    _decl("head", ["list", "element"]), _decl("last", ["list", "element"]),
                    _decl("length", ["list", "int"]), _decl("tail", ["list", "list"])),
        builtins_enabled=frozenset({("empty", 1), ("geq", 2), ("head", 2), ("last", 2),
                                    ("length", 2), ("tail", 2)}),
        max_vars=3, max_body=2, max_clauses=2, max_magic=1,
        magic_setting=MagicSetting("types", frozenset({"element"})), enable_recursion=True)
    train = ([positive() for _ in range(p["pos"])], [negative() for _ in range(p["neg"])])
    test = ([positive() for _ in range(p["test"])], [negative() for _ in range(p["test"])])
    return bias, [], train, test, {"program": "f(A):-head(A,7).\nf(A):-tail(A,B),f(B).\n",
                                   "size": 5}


def is_list_positive(atom: Literal) -> bool:
    return 7 in atom.args[0]


# --- powerof2 ----------------------------------------------------------------

def _gen_powerof2(p, rng):
    _positive(p, "neg", "test")
    if not 1 <= p["max_exp"] <= 30:
        raise ValueError("max_exp must be between 1 and 30")
    top = 2 ** p["max_exp"]
    powers = {2 ** i for i in range(p["max_exp"] + 1)}
    non = [x for x in range(2, top + 1) if x not in powers]
    if len(non) < p["neg"]:
        raise ValueError("not enough non-powers in range for the requested negatives")
    neg = rng.sample(non, p["neg"])
    if p["neg"] > 1 and not any(x % 2 == 0 for x in neg):
        neg[0] = rng.choice([x for x in non if x % 2 == 0 and x not in neg])
    pos = [2 ** i for i in range(1, p["max_exp"] + 1)]
    # held-out positives extend past the training range; negatives are fresh draws
    hi = p["max_exp"] + 10
    test_pos = [2 ** i for i in range(1, hi + 1)]
    test_neg = []
    while len(test_neg) < p["test"]:
        x = rng.randrange(3, 2 ** hi)
        if x & (x - 1) and x not in test_neg:
            test_neg.append(x)
    bias = Bias(
        head_preds=(_decl("multiple", ["number"], ["in"]),),
        body_preds=(_decl("div", ["number", "number", "number"], ["in", "in", "out"]),),
        builtins_enabled=frozenset({("div", 3)}),
        max_vars=3, max_body=2, max_clauses=2, max_magic=1,
        magic_setting=MagicSetting("arguments", frozenset({("multiple", 1), ("div", 2)})),
        enable_recursion=True)
    lit = lambda x: Literal("multiple", (x,))
    return (bias, [], ([lit(x) for x in pos], [lit(x) for x in neg]),
            ([lit(x) for x in test_pos], [lit(x) for x in test_neg]),
            {"program": "multiple(1).\nmultiple(A):-div(A,2,B),multiple(B).\n", "size": 4})


def is_power_of_two(atom: Literal) -> bool:
    x = atom.args[0]
    return type(x) is int and x > 0 and x & (x - 1) == 0


# --- append: lists ending with a fixed suffix --------------------------------

def _gen_append(p, rng):
    _positive(p, "pool", "length", "pos", "neg", "test")
    if p["length"] < 2 or p["pool"] < 2:
        raise ValueError("length and pool must be at least 2")
    consts = [f"c{i}" for i in range(p["pool"])]
    suffix = (rng.choice(consts), rng.choice(consts))

    def positive():
        return Literal("f", (tuple(rng.choice(consts) for _ in range(p["length"] - 2)) + suffix,))

    def negative():
        while True:
            xs = tuple(rng.choice(consts) for _ in range(p["length"]))
            if xs[-2:] != suffix:
                return Literal("f", (xs,))

    bias = Bias(
        head_preds=(_decl("f", ["list"]),),
        body_preds=(_decl("append", ["list", "list", "list"]), _decl("head", ["list", "element"]),
                    _decl("tail", ["list", "list"])),
        builtins_enabled=frozenset({("append", 3), ("head", 2), ("tail", 2)}),
        max_vars=4, max_body=2, max_clauses=1, max_magic=1,
        magic_setting=MagicSetting("types", frozenset({"list"})))
    train = ([positive() for _ in range(p["pos"])], [negative() for _ in range(p["neg"])])
    test = ([positive() for _ in range(p["test"])], [negative() for _ in range(p["test"])])
    return bias, [], train, test, {"suffix": suffix, "size": 2}


# --- pi: area of a circle ----------------------------------------------------

def _gen_pi(p, rng):
    _positive(p, "pos", "neg", "test")
    if not p["margin"] > 0:
        raise ValueError("margin must be positive")

    def radius():
        return rng.uniform(0.1, 10.0)

    def positive():
        r = radius()
        return Literal("area", (r, math.pi * r * r))

    def negative():
        r = radius()
        while True:
            factor = rng.uniform(0.5, 2.0)
            if abs(factor - 1.0) * math.pi > p["margin"]:
                return Literal("area", (r, math.pi * r * r * factor))

    real = "real"
    bias = Bias(
        head_preds=(_decl("area", [real, real], ["in", "out"]),),
        body_preds=(_decl("add", [real] * 3, ["in", "in", "out"]),
                    _decl("mult", [real] * 3, ["in", "in", "out"]),
                    _decl("square", [real] * 2, ["in", "out"]),
                    _decl("subtract", [real] * 3, ["in", "in", "out"])),
        builtins_enabled=frozenset({("add", 3), ("mult", 3), ("square", 2), ("subtract", 3)}),
        max_vars=4, max_body=2, max_clauses=1, max_magic=1,
        magic_setting=MagicSetting("types", frozenset({real})))
    train = ([positive() for _ in range(p["pos"])], [negative() for _ in range(p["neg"])])
    test = ([positive() for _ in range(p["test"])], [negative() for _ in range(p["test"])])
    return bias, [], train, test, {"pi": math.pi, "size": 3}


def pi_violation(atom: Literal) -> float:
    r, a = atom.args
    return abs(a / (r * r) - math.pi)


# --- sumk: two members summing to k ------------------------------------------

def _gen_sumk(p, rng):
    _positive(p, "length", "pos", "neg", "test", "max_value")
    if p["length"] < 2 or p["max_value"] < 4:
        raise ValueError("length must be at least 2 and max_value at least 4")
    hi = p["max_value"]
    k = rng.randint(hi // 2, 2 * hi - 2)
    # keep every element below k so that some lists can avoid all pairs
    vals = list(range(1, hi + 1))

    def has_pair(xs):
        s = set(xs)
        return any(k - x in s for x in xs)

    def positive():
        x = rng.randint(max(1, k - hi), min(hi, k - 1))
        xs = [rng.choice(vals) for _ in range(p["length"])]
        i, j = rng.sample(range(p["length"]), 2)
        xs[i], xs[j] = x, k - x
        return Literal("f", (tuple(xs),))

    def negative():
        xs = []
        # member may pick the same element twice, so k/2 alone is a pair
        banned = {k // 2} if k % 2 == 0 else set()
        while len(xs) < p["length"]:
            x = rng.choice(vals)
            if x in banned:
                continue
            xs.append(x)
            banned.add(k - x)
        assert not has_pair(xs)
        return Literal("f", (tuple(xs),))

    bias = Bias(
        head_preds=(_decl("f", ["list"]),),
        body_preds=(_decl("add", ["number"] * 3), _decl("member", ["list", "number"])),
        builtins_enabled=frozenset({("add", 3), ("member", 2)}),
        max_vars=4, max_body=3, max_clauses=1, max_magic=1,
        magic_setting=MagicSetting("types", frozenset({"number"})))
    train = ([positive() for _ in range(p["pos"])], [negative() for _ in range(p["neg"])])
    test = ([positive() for _ in range(p["test"])], [negative() for _ in range(p["test"])])
    return bias, [], train, test, {"k": k, "size": 4}


def sumk_positive(atom: Literal, k: int) -> bool:
    xs = atom.args[0]
    s = set(xs)
    return any(k - x in s for x in xs)


# --- md_mini: a small minimal-decay game -------------------------------------

def _gen_md_mini(p, rng):
    _positive(p, "values", "pos", "neg", "test")
    if p["values"] < 7:
        raise ValueError("values must be at least 7")
    values = list(range(p["values"]))
    facts = []
    counter = [0]

    def state():
        counter[0] += 1
        s = f"s{counter[0]}"
        action = rng.choice(["press_button", "noop"])
        true = rng.choice(values[1:])
        facts.append(Literal("does", (s, "player", action)))
        facts.append(Literal("true_val", (s, true)))
        nxt = 5 if action == "press_button" else true - 1
        return s, nxt

    def examples(n_pos, n_neg):
        pos, neg = [], []
        for _ in range(n_pos):
            s, nxt = state()
            pos.append(Literal("next_val", (s, nxt)))
        while len(neg) < n_neg:
            s, nxt = state()
            wrong = rng.choice([v for v in values if v != nxt])
            neg.append(Literal("next_val", (s, wrong)))
        return pos, neg

    train = examples(p["pos"], p["neg"])
    test = examples(p["test"], p["test"])
    for v in values[:-1]:
        facts.append(Literal("succ", (v, v + 1)))
    bias = Bias(
        head_preds=(_decl("next_val", ["state", "int"]),),
        body_preds=(_decl("does", ["state", "agent", "action"]),
                    _decl("succ", ["int", "int"]), _decl("true_val", ["state", "int"])),
        max_vars=5, max_body=3, max_clauses=2, max_magic=3,
        magic_setting=MagicSetting("arguments", frozenset(
            {("next_val", 2), ("does", 2), ("does", 3)})))
    truth = {"program": "next_val(A,5):-does(A,player,press_button).\n"
                        "next_val(A,B):-does(A,player,noop),true_val(A,C),succ(B,C).\n",
             "size": 6}
    return bias, facts, train, test, truth


_FAMILIES = {
    "list": (_gen_list, {"pool": 200, "length": 50, "pos": 10, "neg": 10, "test": 100}),
    "powerof2": (_gen_powerof2, {"max_exp": 10, "neg": 10, "test": 100}),
    "append": (_gen_append, {"pool": 200, "length": 10, "pos": 10, "neg": 10, "test": 100}),
    "pi": (_gen_pi, {"pos": 10, "neg": 10, "test": 100, "margin": 1e-2}),
    "sumk": (_gen_sumk, {"length": 50, "pos": 10, "neg": 10, "test": 100, "max_value": 1000}),
    "md_mini": (_gen_md_mini, {"values": 10, "pos": 10, "neg": 10, "test": 50}),
}


def family_defaults(family: str) -> dict:
    if family not in _FAMILIES:
        raise ValueError(f"unknown task family {family!r}")
    return dict(_FAMILIES[family][1])


def gen_task(family: str, params: dict | None = None, seed: int = 0,
             config: EngineConfig | None = None) -> GeneratedTask:
    if family not in _FAMILIES:
        raise ValueError(f"unknown task family {family!r}")
    fn, defaults = _FAMILIES[family]
    p = _params(params or {}, defaults)
    rng = random.Random(seed)
    bias, facts, (pos, neg), (tpos, tneg), truth = fn(p, rng)
    task = build_task(bias, facts, pos, neg, config)
    return GeneratedTask(family, p, seed, task, tpos, tneg, truth)
