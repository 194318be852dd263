"""Depth-first SLD resolution over a hypothesis, ground facts and builtins.

The solver is iterative (an explicit choicepoint stack) so recursion depth
is bounded by the resolution budget rather than the Python stack.  A call to
a hypothesis predicate that is a variant of one of its own ancestors fails
immediately; every answer such a call could produce is also an answer of
the ancestor.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Iterable

from .builtins import BuiltinRegistry, ModeError, make_registry
from .logic import DEFAULT_EPSILON, Clause, Literal, Var, const_eq, const_key


class ProofStatus(enum.Enum):
    ENTAILED = "entailed"
    NOT_ENTAILED = "not_entailed"
    BUDGET_EXCEEDED = "budget_exceeded"


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class ResourceBudget:
    max_resolution_steps: int = 100_000
    max_solutions: int = 100_000
    wall_timeout: float = 10.0

    def __post_init__(self):
        if self.max_resolution_steps <= 0 or self.max_solutions <= 0 or self.wall_timeout <= 0:
            raise ValueError("budget limits must be strictly positive")


class FactBase:
    """Ground atoms indexed by predicate and by first argument."""

    def __init__(self, atoms: Iterable[Literal] = ()):
        self.by_pred: dict = {}
        self.first: dict = {}
        for a in atoms:
            self.add(a)

    def add(self, atom: Literal) -> None:
        if any(type(x) is Var for x in atom.args):
            raise ValueError(f"fact {atom} is not ground")
        key = (atom.pred, len(atom.args))
        rows = self.by_pred.setdefault(key, [])
        if atom.args in self.first.get(key, {}).get(atom.args[0] if atom.args else None, ()):
            return
        rows.append(atom.args)
        if atom.args:
            self.first.setdefault(key, {}).setdefault(atom.args[0], []).append(atom.args)

    def __len__(self):
        return sum(len(r) for r in self.by_pred.values())

    def __contains__(self, key):
        return key in self.by_pred

    def preds(self):
        return set(self.by_pred)

    def atoms(self):
        for (pred, _), rows in self.by_pred.items():
            for r in rows:
                yield Literal(pred, r)

    def rows(self, key, first=None):
        if first is None or type(first) is float or type(first) is tuple:
            return self.by_pred.get(key, ())
        idx = self.first.get(key)
        if idx is None:
            return ()
        return idx.get(first, ())


_UNBOUND = object()


class Ref:
    __slots__ = ("val",)

    def __init__(self):
        self.val = _UNBOUND


def _deref(t):
    while type(t) is Ref:
        v = t.val
        if v is _UNBOUND:
            return t
        t = v
    return t


@dataclass
class SolveResult:
    bindings: list
    truncated: bool = False
    budget_exceeded: bool = False
    mode_error: bool = False
    steps: int = 0

    @property
    def complete(self) -> bool:
        return not (self.truncated or self.budget_exceeded or self.mode_error)


_PROGRAM, _BUILTIN, _FACTS = 0, 1, 2


class _CompiledClause:
    __slots__ = ("nvars", "head", "body")

    def __init__(self, nvars, head, body):
        self.nvars = nvars
        self.head = head
        self.body = body


@dataclass
class Program:
    clauses: dict = field(default_factory=dict)  # (pred, arity) -> [_CompiledClause]


class Interpreter:
    def __init__(self, facts: FactBase | None = None, builtins: BuiltinRegistry | None = None,
                 epsilon: float = DEFAULT_EPSILON):
        self.facts = facts if facts is not None else FactBase()
        self.builtins = builtins if builtins is not None else make_registry(epsilon)
        self.epsilon = epsilon

    # --- compilation -------------------------------------------------------

    def _kind(self, key, program_keys):
        if key in program_keys:
            return _PROGRAM
        if key in self.builtins:
            return _BUILTIN
        return _FACTS

    def order_body(self, clause: Clause, bound_heads: dict) -> list[Literal]:
        """Order body literals so each is called with its inputs bound.

        ``bound_heads`` maps each program predicate to the head positions that
        are bound when it is called.
        """
        bound = set()
        key = (clause.head.pred, len(clause.head.args))
        for i, a in enumerate(clause.head.args):
            if type(a) is Var and i in bound_heads.get(key, ()):
                bound.add(a)
        remaining = [l for l in clause.body if not l.is_magic]
        out = []

        def is_bound(a):
            return type(a) is not Var or a in bound

        def ready(lit):
            k = (lit.pred, len(lit.args))
            if k in bound_heads:
                return all(is_bound(lit.args[i]) for i in bound_heads[k])
            b = self.builtins.get(*k)
            if b is not None:
                return b.callable_with(i for i, a in enumerate(lit.args) if is_bound(a))
            return not lit.args or any(is_bound(a) for a in lit.args)

        while remaining:
            pick = None
            for lit in remaining:
                if (lit.pred, len(lit.args)) not in bound_heads and ready(lit):
                    pick = lit
                    break
            if pick is None:
                for lit in remaining:
                    if ready(lit):
                        pick = lit
                        break
            if pick is None:
                pick = remaining[0]
            remaining.remove(pick)
            out.append(pick)
            bound.update(pick.vars())
        return out

    def compile(self, clauses: Iterable[Clause], bound_heads: dict | None = None) -> Program:
        clauses = list(clauses)
        keys = {(c.head.pred, len(c.head.args)) for c in clauses}
        if bound_heads is None:
            bound_heads = {k: tuple(range(k[1])) for k in keys}
        prog = Program()
        for c in clauses:
            if any(l.is_magic for l in c.body):
                raise ValueError("cannot execute a clause with magic literals")
            index = {v: i for i, v in enumerate(c.vars())}

            def enc(t):
                return index[t] if type(t) is Var else _Const(t)

            body = []
            for lit in self.order_body(c, bound_heads):
                k = (lit.pred, len(lit.args))
                kind = self._kind(k, keys)
                target = self.builtins.get(*k) if kind == _BUILTIN else k
                body.append((kind, target, tuple(enc(a) for a in lit.args)))
            prog.clauses.setdefault((c.head.pred, len(c.head.args)), []).append(
                _CompiledClause(len(index), tuple(enc(a) for a in c.head.args), tuple(body)))
        return prog

    # --- execution ---------------------------------------------------------

    def _unify(self, a, b, trail) -> bool:
        a = _deref(a)
        b = _deref(b)
        if a is b:
            return True
        if type(a) is Ref:
            a.val = b
            trail.append(a)
            return True
        if type(b) is Ref:
            b.val = a
            trail.append(b)
            return True
        return const_eq(a, b, self.epsilon)

    def _run(self, prog: Program, goals, budget: ResourceBudget, counter: list):
        """Yield once per refutation of ``goals`` (a linked continuation)."""
        trail: list = []
        stack: list = []
        max_steps = budget.max_resolution_steps
        deadline = time.monotonic() + budget.wall_timeout
        facts = self.facts
        unify = self._unify
        eps = self.epsilon

        def undo(mark):
            while len(trail) > mark:
                trail.pop().val = _UNBOUND

        def tick():
            counter[0] += 1
            if counter[0] > max_steps:
                raise BudgetExceeded
            if counter[0] & 1023 == 0 and time.monotonic() > deadline:
                raise BudgetExceeded

        def expand(goal, mark):
            kind, target, args, anc, rest = goal
            if kind == _BUILTIN:
                vals = [_deref(a) for a in args]
                call = [None if type(v) is Ref else v for v in vals]
                for sol in target.fn(call):
                    tick()
                    undo(mark)
                    ok = True
                    for v, s in zip(vals, sol):
                        if type(v) is Ref:
                            if v.val is _UNBOUND:
                                v.val = s
                                trail.append(v)
                            elif not const_eq(v.val, s, eps):
                                ok = False
                                break
                        elif v is not s and not const_eq(v, s, eps):
                            ok = False
                            break
                    if ok:
                        yield rest
                return
            if kind == _FACTS:
                first = _deref(args[0]) if args else None
                rows = facts.rows(target, None if type(first) is Ref else first)
                for row in rows:
                    tick()
                    undo(mark)
                    if all(unify(a, r, trail) for a, r in zip(args, row)):
                        yield rest
                return
            # hypothesis predicate: variant check against ancestors
            snap = _snapshot(target, args)
            node = anc
            while node is not None:
                if node[0] == snap:
                    return
                node = node[1]
            child_anc = (snap, anc)
            for cl in prog.clauses.get(target, ()):
                tick()
                undo(mark)
                refs = [Ref() for _ in range(cl.nvars)]
                ok = True
                for h, a in zip(cl.head, args):
                    t = refs[h] if type(h) is int else h.value
                    if not unify(t, a, trail):
                        ok = False
                        break
                if not ok:
                    continue
                cont = rest
                for kind2, target2, bargs in reversed(cl.body):
                    resolved = tuple(refs[x] if type(x) is int else x.value for x in bargs)
                    cont = (kind2, target2, resolved, child_anc, cont)
                yield cont
            undo(mark)

        cont = goals
        while True:
            if cont is None:
                yield
            else:
                stack.append((expand(cont, len(trail)), len(trail)))
            while stack:
                it, mark = stack[-1]
                nxt = next(it, _FAIL)
                if nxt is _FAIL:
                    stack.pop()
                    undo(mark)
                    continue
                cont = nxt
                break
            else:
                return

    def _goal(self, prog: Program, atom: Literal, terms):
        key = (atom.pred, len(atom.args))
        kind = self._kind(key, prog.clauses)
        target = self.builtins.get(*key) if kind == _BUILTIN else key
        return (kind, target, tuple(terms), None, None)

    def prove(self, program, goal: Literal, budget: ResourceBudget | None = None) -> ProofStatus:
        """Decide whether a ground goal follows from the program and background."""
        status, _ = self.prove_ex(program, goal, budget)
        return status

    def prove_ex(self, program, goal: Literal, budget: ResourceBudget | None = None):
        """Like :meth:`prove`, also reporting whether a builtin mode error occurred."""
        budget = budget or ResourceBudget()
        if any(type(a) is Var for a in goal.args):
            raise ValueError("prove expects a ground goal")
        prog = program if isinstance(program, Program) else self.compile(program)
        counter = [0]
        try:
            for _ in self._run(prog, self._goal(prog, goal, goal.args), budget, counter):
                return ProofStatus.ENTAILED, False
        except BudgetExceeded:
            return ProofStatus.BUDGET_EXCEEDED, False
        except ModeError:
            return ProofStatus.NOT_ENTAILED, True
        return ProofStatus.NOT_ENTAILED, False

    def solve(self, program, goal: Literal, budget: ResourceBudget | None = None,
              allow_free: bool = False) -> SolveResult:
        """All distinct bindings of the goal's variables (in first-occurrence order).

        With ``allow_free`` an answer may leave a variable unbound; it is then
        reported as ``None`` in that position.  Otherwise such answers are
        dropped.
        """
        budget = budget or ResourceBudget()
        gvars = list(dict.fromkeys(a for a in goal.args if type(a) is Var))
        if isinstance(program, Program):
            prog = program
        else:
            key = (goal.pred, len(goal.args))
            bound = tuple(i for i, a in enumerate(goal.args) if type(a) is not Var)
            prog = self.compile(program, {key: bound} if any(
                (c.head.pred, len(c.head.args)) == key for c in program) else None)
        refs = {v: Ref() for v in gvars}
        terms = [refs[a] if type(a) is Var else a for a in goal.args]
        out: dict = {}
        res = SolveResult([])
        counter = [0]
        try:
            for _ in self._run(prog, self._goal(prog, goal, terms), budget, counter):
                vals = []
                for v in gvars:
                    x = _deref(refs[v])
                    vals.append(None if type(x) is Ref else x)
                if not allow_free and None in vals:
                    continue
                t = tuple(vals)
                if t not in out:
                    out[t] = None
                    if len(out) >= budget.max_solutions:
                        res.truncated = True
                        break
        except BudgetExceeded:
            res.budget_exceeded = True
        except ModeError:
            res.mode_error = True
        res.steps = counter[0]
        res.bindings = sorted(out, key=binding_key)
        return res


class _Const:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


_FAIL = object()


def _snapshot(target, args):
    names = {}
    out = []
    for a in args:
        a = _deref(a)
        if type(a) is Ref:
            out.append(("$v", names.setdefault(id(a), len(names))))
        else:
            out.append(a)
    return (target, tuple(out))


def binding_key(b):
    return tuple((4,) if v is None else const_key(v) for v in b)
