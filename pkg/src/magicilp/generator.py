"""Size-ordered enumeration of candidate hypotheses.

Clauses are built once per body length into a pool sorted by canonical
order.  A hypothesis is a sorted multiset of pool clauses; each size level
is walked depth-first over pool indices, which visits hypotheses in
lexicographic order of their canonical encodings.  Candidates that violate
the constraint store are skipped, never emitted.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .builtins import BuiltinRegistry, make_registry
from .logic import Clause, Hypothesis, Literal, Var, canonicalize, clause_is_recursive, clause_order, magic
from .taskio import Bias


class Exhausted(Exception):
    pass


# --- clause admissibility ----------------------------------------------------

def _decls(bias: Bias):
    return {d.key: d for d in bias.head_preds + bias.body_preds}


def var_types(bias: Bias, clause: Clause):
    """Declared type of each variable, or None when the clause is ill-typed."""
    decls = _decls(bias)
    types: dict = {}
    for lit in (clause.head,) + clause.ordinary_body:
        d = decls.get((lit.pred, len(lit.args)))
        if d is None:
            return None
        if d.types is None:
            continue
        for a, t in zip(lit.args, d.types):
            if type(a) is not Var:
                continue
            seen = types.setdefault(a, t)
            if seen != t:
                return None
    return types


def head_connected(clause: Clause) -> bool:
    """Every body literal is linked to the head through shared variables."""
    reached = set(clause.head.vars())
    todo = list(clause.ordinary_body)
    while todo:
        for i, lit in enumerate(todo):
            if reached.intersection(lit.vars()):
                reached.update(lit.vars())
                del todo[i]
                break
        else:
            return False
    return True


def _needs(lit: Literal, decl, builtins: BuiltinRegistry):
    """Return a test ``bound -> bool`` saying whether ``lit`` can be called."""
    if decl is not None and decl.directions is not None:
        ins = [a for a, d in zip(lit.args, decl.directions) if d == "in" and type(a) is Var]
        return lambda bound: all(a in bound for a in ins)
    b = builtins.get(lit.pred, len(lit.args))
    if b is not None:
        return lambda bound: b.callable_with(
            i for i, a in enumerate(lit.args) if type(a) is not Var or a in bound)
    return lambda bound: True


def directions_ok(bias: Bias, clause: Clause, builtins: BuiltinRegistry) -> bool:
    """Some body order calls every literal with its inputs bound.

    Magic variables count as bound from the start, and so do head variables
    unless the head declares directions: then only its inputs start bound and
    its outputs must be bound by some body literal.
    """
    decls = _decls(bias)
    head = clause.head
    hdecl = decls.get((head.pred, len(head.args)))
    if hdecl is not None and hdecl.directions is not None:
        bound = {a for a, d in zip(head.args, hdecl.directions) if d == "in" and type(a) is Var}
    else:
        bound = set(head.vars())
    bound |= set(clause.magic_vars)
    todo = [(lit, _needs(lit, decls.get((lit.pred, len(lit.args))), builtins))
            for lit in clause.ordinary_body]
    while todo:
        for i, (lit, ready) in enumerate(todo):
            if ready(bound):
                bound.update(lit.vars())
                del todo[i]
                break
        else:
            return False
    return set(head.vars()) <= bound


def magic_eligible(bias: Bias, clause: Clause, types=None) -> list[Var]:
    """Variables the magic setting allows to be marked, in first-occurrence order."""
    ms = bias.magic_setting
    vs = clause.vars()
    if ms.kind == "all":
        return vs
    if ms.kind == "types":
        types = types if types is not None else (var_types(bias, clause) or {})
        return [v for v in vs if types.get(v) in ms.values]
    ok = set()
    for lit in (clause.head,) + clause.ordinary_body:
        for i, a in enumerate(lit.args, start=1):
            if type(a) is Var and (lit.pred, i) in ms.values:
                ok.add(a)
    return [v for v in vs if v in ok]


def admits(bias: Bias, clause: Clause, builtins: BuiltinRegistry | None = None) -> bool:
    """Whether ``clause`` belongs to the clause space the bias defines."""
    builtins = builtins if builtins is not None else make_registry()
    target = bias.target
    head = clause.head
    if (head.pred, len(head.args)) != target.key:
        return False
    if any(type(a) is not Var for a in head.args) or len(set(head.args)) != len(head.args):
        return False
    body = clause.ordinary_body
    if len(body) > bias.max_body or len(clause.vars()) > bias.max_vars:
        return False
    body_keys = {d.key for d in bias.body_preds}
    for lit in body:
        key = (lit.pred, len(lit.args))
        if key == target.key:
            if not bias.enable_recursion or lit == head:
                return False
        elif key not in body_keys:
            return False
        if any(type(a) is not Var for a in lit.args):
            return False
    if len(set(body)) != len(body):
        return False
    mv = clause.magic_vars
    if len(mv) > bias.max_magic or len(set(mv)) != len(mv):
        return False
    types = var_types(bias, clause)
    if types is None:
        return False
    eligible = set(magic_eligible(bias, clause, types))
    if not set(mv) <= eligible:
        return False
    if not body:
        return set(head.args) <= set(mv)
    return head_connected(clause) and directions_ok(bias, clause, builtins)


# --- clause pool -------------------------------------------------------------

def _body_literals(bias: Bias):
    preds = [d.key for d in bias.body_preds]
    if bias.enable_recursion:
        preds.append(bias.target.key)
    return sorted(set(preds))


def clauses_with_body(bias: Bias, n: int, builtins: BuiltinRegistry) -> list[Clause]:
    """All admissible canonical clauses with exactly ``n`` ordinary body literals."""
    target = bias.target
    head = Literal(target.name, tuple(Var(i) for i in range(target.arity)))
    if target.arity > bias.max_vars:
        return []
    decls = _decls(bias)
    preds = _body_literals(bias)
    bodies = set()
    head_types = {Var(i): t for i, t in enumerate(target.types or ())}

    def extend(body, nv, start, types):
        if len(body) == n:
            bodies.add(tuple(body))
            return
        for pi in range(start, len(preds)):
            name, arity = preds[pi]
            d = decls.get((name, arity))
            for args, nv2, types2 in _arg_tuples(arity, nv, bias.max_vars, d and d.types, types):
                body.append(Literal(name, args))
                extend(body, nv2, pi, types2)
                body.pop()

    extend([], target.arity, 0, head_types)
    out = set()
    for body in bodies:
        base = Clause(head, body)
        if len(set(body)) != n:
            continue
        types = var_types(bias, base)
        if types is None:
            continue
        if n and not head_connected(base):
            continue
        if not admits_structure(bias, base):
            continue
        eligible = magic_eligible(bias, base, types)
        for k in range(0, min(bias.max_magic, len(eligible)) + 1):
            for subset in itertools.combinations(eligible, k):
                c = Clause(head, body + tuple(magic(v) for v in subset))
                if n == 0 and not set(head.args) <= set(subset):
                    continue
                if directions_ok(bias, c, builtins):
                    out.add(canonicalize(c))
    return sorted(out, key=clause_order)


def admits_structure(bias: Bias, clause: Clause) -> bool:
    target = bias.target
    for lit in clause.body:
        if (lit.pred, len(lit.args)) == target.key:
            if not bias.enable_recursion or lit == clause.head:
                return False
    return True


def _arg_tuples(arity: int, nv: int, max_vars: int, arg_types=None, types=None):
    """Argument tuples over existing variables plus fresh ones numbered in order.

    With ``arg_types`` given, a variable is only placed where its known type
    agrees; each tuple comes with the variable count and types it leaves.
    """
    types = types or {}

    def rec(i, cur, nv, types):
        if i == arity:
            yield tuple(cur), nv, types
            return
        t = arg_types[i] if arg_types else None
        for v in range(nv):
            var = Var(v)
            vt = types.get(var)
            if t is not None and vt is not None and vt != t:
                continue
            cur.append(var)
            yield from rec(i + 1, cur, nv, types if vt is not None or t is None else {**types, var: t})
            cur.pop()
        if nv < max_vars:
            var = Var(nv)
            cur.append(var)
            yield from rec(i + 1, cur, nv + 1, types if t is None else {**types, var: t})
            cur.pop()
    yield from rec(0, [], nv, types)


# --- hypothesis enumeration --------------------------------------------------

class Generator:
    """Single-owner cursor over the hypothesis space, smallest hypotheses first."""

    def __init__(self, bias: Bias, builtins: BuiltinRegistry | None = None):
        self.bias = bias
        self.builtins = builtins if builtins is not None else make_registry()
        self.max_size = bias.max_clauses * (1 + bias.max_body)
        self.current_size = 1
        self._by_body: dict = {}
        self._pool: list = []  # clauses sorted by canonical order
        self._rec: list = []
        self._emitted = 0
        self._level = None

    def clauses(self, n: int) -> list[Clause]:
        if n not in self._by_body:
            self._by_body[n] = clauses_with_body(self.bias, n, self.builtins)
        return self._by_body[n]

    def _pool_upto(self, size: int):
        """Pool of clauses whose size is at most ``size``."""
        target = self.bias.target.key
        while len(self._by_body) < min(size, self.bias.max_body + 1):
            n = len(self._by_body)
            self.clauses(n)
        pool = [c for n in sorted(self._by_body) for c in self._by_body[n] if c.size() <= size]
        pool.sort(key=clause_order)
        self._pool = pool
        self._rec = [clause_is_recursive(c, {target}) for c in pool]

    def _walk(self, size: int, store):
        pool = self._pool
        rec = self._rec
        sizes = [c.size() for c in pool]
        max_clauses = self.bias.max_clauses
        chosen: list = []

        def dfs(start, remaining):
            for i in range(start, len(pool)):
                s = sizes[i]
                if s > remaining:
                    break  # pool is sorted by size first
                if s != remaining and len(chosen) + 1 >= max_clauses:
                    continue
                if chosen and chosen[-1] == i and not pool[i].magic_vars:
                    continue
                chosen.append(i)
                if s == remaining:
                    if any(not rec[j] for j in chosen):
                        h = Hypothesis((pool[j] for j in chosen), canonical=True)
                        if store is None or not store.violates(h):
                            yield h
                elif len(chosen) < max_clauses:
                    yield from dfs(i, remaining - s)
                chosen.pop()

        yield from dfs(0, size)

    def __iter__(self):
        return self

    def next_candidate(self, store=None) -> Hypothesis:
        while True:
            if self._level is None:
                if self.current_size > self.max_size:
                    raise Exhausted
                self._pool_upto(self.current_size)
                self._level = self._walk(self.current_size, store)
            h = next(self._level, None)
            if h is not None:
                self._emitted += 1
                return h
            self._level = None
            self.current_size += 1

    def __next__(self):
        try:
            return self.next_candidate(None)
        except Exhausted:
            raise StopIteration from None


def enumerate_hypotheses(bias: Bias, store=None, builtins=None):
    gen = Generator(bias, builtins)
    while True:
        try:
            yield gen.next_candidate(store)
        except Exhausted:
            return


# --- search-space size -------------------------------------------------------

def space_bound(Db: int, Dh: int, v: int, a: int, m: int, n: int) -> int:
    """n * (Dh * v^a * m * (Db * v^a)^m)^n, the hypothesis-space upper bound."""
    for x in (Db, Dh, v, a, m, n):
        if type(x) is not int or x < 0:
            raise ValueError("space parameters must be natural numbers")
    return n * (Dh * v ** a * m * (Db * v ** a) ** m) ** n


def count_space(bias: Bias, with_unary_constants: bool = False, c: int = 0) -> int:
    """Space bound for ``bias``; with unary constants the body alphabet grows by ``c``."""
    Db = len(bias.body_preds)
    decls = bias.head_preds + bias.body_preds
    a = max(d.arity for d in decls) if decls else 0
    extra = c if with_unary_constants else 0
    return space_bound(Db + extra, len(bias.head_preds), bias.max_vars, a,
                       bias.max_body, bias.max_clauses)


def space_ratio(Db: int, Dh: int, v: int, a: int, m: int, n: int, c: int) -> Fraction:
    base = space_bound(Db, Dh, v, a, m, n)
    if base == 0:
        raise ValueError("base space is empty")
    return Fraction(space_bound(Db + c, Dh, v, a, m, n), base)
