"""The generate, test and constrain loop."""

from __future__ import annotations

import time

from .constraints import Constraint, ConstraintStore, Kind, has_fresh, infer
from .generator import Exhausted, Generator
from .interpreter import Interpreter, ProofStatus, ResourceBudget
from .logic import Hypothesis, hypothesis_size
from .magic import evaluate, instantiate
from .taskio import LearnResult, Stats, TaskSpec

_STAT_FIELD = {
    Kind.SPECIALISATION: "constraints_specialisation",
    Kind.GENERALISATION: "constraints_generalisation",
    Kind.REDUNDANCY: "constraints_redundancy",
    Kind.BANISH: "constraints_banish",
}


def make_interpreter(task: TaskSpec, epsilon: float | None = None) -> Interpreter:
    eps = task.config.solver_epsilon if epsilon is None else epsilon
    builtins = task.builtins
    if epsilon is not None:
        from .builtins import make_registry
        builtins = make_registry(eps).restricted(task.bias.builtins_enabled)
    return Interpreter(task.facts, builtins, eps)


def learn(task: TaskSpec, trace=None) -> LearnResult:
    """Return the smallest instantiated hypothesis that is complete and consistent.

    ``trace``, if given, is called with each tested hypothesis and its report.
    """
    cfg = task.config
    start = time.monotonic()
    deadline = start + cfg.timeout
    interp = make_interpreter(task)
    gen = Generator(task.bias, task.builtins)
    store = ConstraintStore(cfg.solver_epsilon)
    stats = Stats()
    n_pos = len(task.pos)

    def done(program, status):
        stats.elapsed_ms = int(round((time.monotonic() - start) * 1000))
        size = hypothesis_size(program) if program is not None else 0
        return LearnResult(program, size, status, stats)

    while True:
        if time.monotonic() > deadline:
            return done(None, "timeout")
        try:
            h = gen.next_candidate(store)
        except Exhausted:
            return done(None, "exhausted")
        stats.candidates_generated += 1
        report = evaluate(h, interp, task.pos, task.neg, cfg.max_instantiations, cfg.budget)
        stats.candidates_tested += 1
        stats.instantiations_tested += len(report.bindings)
        stats.budget_exceeded_count += report.budget_exceeded
        if trace is not None:
            trace(h, report)
        sols = report.solutions()
        for i in sols:
            b = report.bindings[i]
            if not has_fresh(b):
                return done(instantiate(h, b), "solved")
        if sols:
            # only placeholder rows succeeded; no constraint is licensed
            continue
        if report.truncated:
            cons = [Constraint(Kind.BANISH, h)]
        else:
            cons = infer(h, report, n_pos)
        for con in cons:
            if store.add([con]):
                field = _STAT_FIELD[con.kind]
                setattr(stats, field, getattr(stats, field) + 1)


def coverage(program: Hypothesis, interp: Interpreter, atoms, budget=None) -> list[bool]:
    budget = budget or ResourceBudget()
    compiled = interp.compile(program)
    return [interp.prove(compiled, a, budget) is ProofStatus.ENTAILED for a in atoms]


def score(program: Hypothesis, interp: Interpreter, pos, neg, budget=None) -> float:
    """Balanced accuracy (tp/p + tn/n) / 2."""
    if not pos or not neg:
        raise ValueError("balanced accuracy needs both positive and negative examples")
    for c in program:
        if c.magic_vars:
            raise ValueError("cannot score a hypothesis with magic literals")
    tp = sum(coverage(program, interp, pos, budget))
    tn = len(neg) - sum(coverage(program, interp, neg, budget))
    return balanced_accuracy(tp, len(pos), tn, len(neg))


def score_task(program: Hypothesis, task: TaskSpec, pos=None, neg=None) -> float:
    """Balanced accuracy with reals compared at the task tolerance, not the solver's."""
    interp = make_interpreter(task, task.config.epsilon)
    return score(program, interp, task.pos if pos is None else pos,
                 task.neg if neg is None else neg, task.config.budget)


def balanced_accuracy(tp: int, p: int, tn: int, n: int) -> float:
    if p <= 0 or n <= 0:
        raise ValueError("balanced accuracy is undefined without both classes")
    return (tp / p + tn / n) / 2
