"""Testing magic hypotheses with lazily bound constants.

Each magic variable becomes an extra argument of the target predicate.
Running the lifted program on a positive example binds those arguments to
exactly the constants that let the example be derived, so the engine never
enumerates a constant domain.  A position that a derivation leaves unbound
accepts any constant; it is expanded over the values harvested for that
position, and over the values negative examples bind it to, plus
:data:`FRESH`, which stands for every other constant.  All constants that
FRESH stands for cover exactly the same examples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .interpreter import Interpreter, ProofStatus, ResourceBudget, binding_key
from .logic import (FRESH, Clause, Hypothesis, Literal, Var, apply, const_eq, has_float)


@dataclass(frozen=True)
class LiftedHypothesis:
    clauses: tuple
    magic_order: tuple  # (clause index, magic variable) per appended position
    target: tuple  # (name, original arity)

    @property
    def k(self) -> int:
        return len(self.magic_order)


def lift(h: Hypothesis) -> LiftedHypothesis:
    """Append every magic variable of ``h`` to the target predicate's arguments."""
    clauses = list(h)
    if not clauses:
        raise ValueError("cannot lift an empty hypothesis")
    target = (clauses[0].head.pred, len(clauses[0].head.args))
    order = [(i, v) for i, c in enumerate(clauses) for v in c.magic_vars]
    if not order:
        raise ValueError("hypothesis has no magic literals to lift")
    return _lift(clauses, order, target)


def _lift(clauses, order, target) -> LiftedHypothesis:
    out = []
    for i, c in enumerate(clauses):
        top = max((v.index for v in c.vars()), default=-1) + 1
        extra = []
        for j, (ci, v) in enumerate(order):
            extra.append(v if ci == i else Var(top + j))
        extra = tuple(extra)

        def thread(lit):
            if (lit.pred, len(lit.args)) == target:
                return Literal(lit.pred, lit.args + extra)
            return lit

        body = [thread(l) for l in c.body if not l.is_magic]
        out.append(Clause(thread(c.head), body))
    return LiftedHypothesis(tuple(out), tuple(order), target)


def lift_any(h: Hypothesis) -> LiftedHypothesis:
    """Like :func:`lift` but a magic-free hypothesis lifts to itself with k = 0."""
    clauses = list(h)
    target = (clauses[0].head.pred, len(clauses[0].head.args))
    order = [(i, v) for i, c in enumerate(clauses) for v in c.magic_vars]
    return _lift(clauses, order, target)


def instantiate(h: Hypothesis, b: tuple) -> Hypothesis:
    """Replace the magic variables of ``h`` by the constants of ``b``."""
    clauses = list(h)
    order = [(i, v) for i, c in enumerate(clauses) for v in c.magic_vars]
    if len(b) != len(order):
        raise ValueError(f"binding has {len(b)} values for {len(order)} magic variables")
    theta: dict = {}
    for (i, v), value in zip(order, b):
        theta.setdefault(i, {})[v] = value
    return Hypothesis(apply(c, theta.get(i, {})) for i, c in enumerate(clauses))


# --- harvesting --------------------------------------------------------------

@dataclass
class _Answers:
    """Solutions of a lifted query on one example."""
    exact: set = field(default_factory=set)
    loose: list = field(default_factory=list)  # solutions with free or float positions
    complete: bool = True

    def add(self, sol):
        if None in sol or any(has_float(x) for x in sol):
            self.loose.append(sol)
        else:
            self.exact.add(sol)


def compatible(sol, b, eps) -> bool:
    for s, x in zip(sol, b):
        if s is None:
            continue
        if x == FRESH or not const_eq(s, x, eps):
            return False
    return True


def _covers(ans: _Answers, b, eps) -> bool:
    if b in ans.exact:
        return True
    return any(compatible(s, b, eps) for s in ans.loose)


@dataclass
class HarvestResult:
    bindings: list
    answers: list  # per positive example
    truncated: bool = False
    budget_exceeded: int = 0
    mode_error: bool = False


def _lifted_goal(atom: Literal, k: int) -> Literal:
    return Literal(atom.pred, atom.args + tuple(Var(j) for j in range(k)))


def _query(interp: Interpreter, program, atom: Literal, k: int, budget: ResourceBudget):
    res = interp.solve(program, _lifted_goal(atom, k), budget, allow_free=True)
    ans = _Answers()
    for sol in res.bindings:
        ans.add(sol)
    ans.complete = res.complete
    return ans, res


def _dedupe(values, eps):
    """Drop values within ``eps`` of an earlier one; exact values are hashed."""
    out = []
    floats = []
    for v in values:
        if has_float(v):
            if any(const_eq(v, u, eps) for u in floats):
                continue
            floats.append(v)
        out.append(v)
    return out


def harvest(lh: LiftedHypothesis, interp: Interpreter, pos, cap: int,
            budget: ResourceBudget | None = None, extra=None) -> HarvestResult:
    """Bindings for the lifted positions under which some positive example is derivable.

    ``extra`` is called, only if something was harvested, for per-position
    values a free position is expanded over besides the harvested ones.
    """
    budget = budget or ResourceBudget()
    k = lh.k
    program = interp.compile(lh.clauses, {(lh.target[0], lh.target[1] + k): tuple(range(lh.target[1]))})
    result = HarvestResult([], [])
    sols = []
    for atom in pos:
        ans, res = _query(interp, program, atom, k, budget)
        result.answers.append(ans)
        if res.budget_exceeded:
            result.budget_exceeded += 1
        if res.mode_error:
            result.mode_error = True
        if not res.complete:
            result.truncated = True
        sols.extend(res.bindings)
    eps = interp.epsilon
    columns = []
    more = extra() if extra is not None and sols else None
    for j in range(k):
        seen = [s[j] for s in sols if s[j] is not None]
        if more is not None:
            seen += [x for x in more[j] if x is not None]
        columns.append(_dedupe(dict.fromkeys(seen), eps))
    for col in columns:
        col.append(FRESH)
    out = []
    index = {}
    for s in sols:
        choices = [[x] if x is not None else columns[j] for j, x in enumerate(s)]
        for b in itertools.product(*choices):
            b = tuple(_representative(x, columns[j], eps) for j, x in enumerate(b))
            if b in index:
                continue
            index[b] = None
            out.append(b)
            if len(out) > cap:
                result.truncated = True
                break
        if len(out) > cap:
            break
    out.sort(key=binding_key)
    result.bindings = out[:cap]
    return result


def _representative(x, column, eps):
    if not has_float(x):
        return x
    for u in column:
        if const_eq(x, u, eps):
            return u
    return x


# --- evaluation --------------------------------------------------------------

@dataclass
class OutcomeReport:
    bindings: list
    pos_cov: list  # bitmask over positives per binding
    neg_cov: list  # bitmask over negatives per binding
    truncated: bool = False
    budget_exceeded: int = 0
    n_pos: int = 0
    n_neg: int = 0

    def complete(self, i) -> bool:
        return self.pos_cov[i] == (1 << self.n_pos) - 1

    def consistent(self, i) -> bool:
        return self.neg_cov[i] == 0

    def solutions(self) -> list[int]:
        """Rows that are complete and consistent, in binding order."""
        return [i for i in range(len(self.bindings)) if self.complete(i) and self.consistent(i)]

    def rows(self):
        for i, b in enumerate(self.bindings):
            yield b, self.pos_cov[i], self.neg_cov[i]


def evaluate(h: Hypothesis, interp: Interpreter, pos, neg, cap: int = 10_000,
             budget: ResourceBudget | None = None) -> OutcomeReport:
    """Relevant instantiations of ``h`` with their coverage of the examples."""
    budget = budget or ResourceBudget()
    lh = lift_any(h)
    k = lh.k
    eps = interp.epsilon
    program = interp.compile(lh.clauses, {(lh.target[0], lh.target[1] + k): tuple(range(lh.target[1]))})
    # the constants negatives bind must not hide behind FRESH
    neg_answers = []
    budget_hits = 0

    def neg_columns():
        nonlocal budget_hits
        for atom in neg:
            ans, res = _query(interp, program, atom, k, budget)
            budget_hits += res.budget_exceeded
            neg_answers.append(ans if res.complete else None)
        return [[s[j] for ans in neg_answers if ans is not None
                 for s in itertools.chain(ans.exact, ans.loose)] for j in range(k)]

    hv = harvest(lh, interp, pos, cap, budget, neg_columns)
    report = OutcomeReport([], [], [], truncated=hv.truncated or hv.mode_error,
                           budget_exceeded=hv.budget_exceeded, n_pos=len(pos), n_neg=len(neg))
    report.bindings = hv.bindings
    for b in hv.bindings:
        mask = 0
        for e, ans in enumerate(hv.answers):
            if _covers(ans, b, eps):
                mask |= 1 << e
        report.pos_cov.append(mask)
    if not hv.bindings:
        return report
    report.budget_exceeded += budget_hits
    neg_masks = [0] * len(hv.bindings)
    direct = None
    for e, atom in enumerate(neg):
        ans = neg_answers[e]
        if ans is not None:
            for i, b in enumerate(hv.bindings):
                if _covers(ans, b, eps):
                    neg_masks[i] |= 1 << e
            continue
        # the lifted query was cut short: fall back to proving each instantiation
        if direct is None:
            direct = [interp.compile(instantiate(h, b)) if FRESH not in b else None
                      for b in hv.bindings]
        for i, b in enumerate(hv.bindings):
            if FRESH in b:
                report.truncated = True
                continue
            status, mode_error = interp.prove_ex(direct[i], atom, budget)
            if status is ProofStatus.ENTAILED:
                neg_masks[i] |= 1 << e
            elif status is ProofStatus.BUDGET_EXCEEDED or mode_error:
                report.budget_exceeded += status is ProofStatus.BUDGET_EXCEEDED
                report.truncated = True
    report.neg_cov = neg_masks
    return report
