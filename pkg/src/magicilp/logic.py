"""Terms, literals, clauses and hypotheses.

Constants are plain Python values: ``str`` for symbols, ``int``, ``float`` and
``tuple`` for ground lists.  Variables are :class:`Var` instances whose index
is local to the clause they occur in.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

MAGIC = "@magic"

# Marker constant used to fill a magic position that no derivation constrains.
# It cannot be written in task files and no builtin accepts it.
FRESH = "$fresh"

DEFAULT_EPSILON = 1e-6


class Var:
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def __eq__(self, other):
        return type(other) is Var and other.index == self.index

    def __hash__(self):
        return hash(("Var", self.index))

    def __repr__(self):
        return f"V{self.index}"


def is_var(t) -> bool:
    return type(t) is Var


def is_const(t) -> bool:
    return type(t) is not Var


def check_const(value):
    """Validate a constant value, returning it unchanged."""
    if isinstance(value, bool):
        raise TypeError("booleans are not constants")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float constant {value!r}")
        return value
    if isinstance(value, (int, str)):
        return value
    if isinstance(value, tuple):
        for v in value:
            check_const(v)
        return value
    raise TypeError(f"unsupported constant {value!r}")


def const_eq(a, b, eps: float = DEFAULT_EPSILON) -> bool:
    """Equality on constants; floats compare within ``eps`` (relative above 1)."""
    if a == b:
        return True
    ta, tb = type(a), type(b)
    if ta is float or tb is float:
        if (ta is float or ta is int) and (tb is float or tb is int):
            return abs(a - b) <= eps * max(1.0, abs(a), abs(b))
        return False
    if ta is tuple and tb is tuple and len(a) == len(b):
        return all(const_eq(x, y, eps) for x, y in zip(a, b))
    return False


def has_float(value) -> bool:
    if type(value) is float:
        return True
    if type(value) is tuple:
        return any(has_float(v) for v in value)
    return False


def const_key(c):
    """Total order on constants: numbers, then symbols, then lists."""
    t = type(c)
    if t is int:
        return (0, c, 0)
    if t is float:
        return (0, c, 1)
    if t is str:
        if c == FRESH:
            return (3,)
        return (1, c)
    if t is tuple:
        return (2, tuple(const_key(x) for x in c))
    raise TypeError(f"not a constant: {c!r}")


def term_key(t):
    if type(t) is Var:
        return (0, t.index)
    return (1, const_key(t))


class Literal(NamedTuple):
    pred: str
    args: tuple

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_magic(self) -> bool:
        return self.pred == MAGIC

    def vars(self) -> list[Var]:
        return [a for a in self.args if type(a) is Var]

    def key(self):
        return (1 if self.pred == MAGIC else 0, self.pred, len(self.args),
                tuple(term_key(a) for a in self.args))


def magic(v: Var) -> Literal:
    return Literal(MAGIC, (v,))


class Clause:
    """A definite clause.  Instances are immutable and hashable."""

    __slots__ = ("head", "body", "_hash")

    def __init__(self, head: Literal, body: Iterable[Literal] = ()):
        if head.is_magic:
            raise ValueError("clause head cannot be a magic literal")
        self.head = head
        self.body = tuple(body)
        marked = []
        for lit in self.body:
            if lit.is_magic:
                if len(lit.args) != 1 or type(lit.args[0]) is not Var:
                    raise ValueError(f"malformed magic literal {lit!r}")
                marked.append(lit.args[0])
        if marked:
            if len(set(marked)) != len(marked):
                raise ValueError("variable marked magic twice")
            used = set(head.args)
            for lit in self.body:
                if not lit.is_magic:
                    used.update(lit.args)
            if not used.issuperset(marked):
                raise ValueError("magic variable does not occur outside its magic literal")
        self._hash = hash((self.head, self.body))

    def __eq__(self, other):
        return (type(other) is Clause and self._hash == other._hash
                and self.head == other.head and self.body == other.body)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Clause({format_clause(self)})"

    @property
    def ordinary_body(self) -> tuple[Literal, ...]:
        return tuple(lit for lit in self.body if not lit.is_magic)

    @property
    def magic_vars(self) -> list[Var]:
        return [lit.args[0] for lit in self.body if lit.is_magic]

    def size(self) -> int:
        return 1 + sum(1 for lit in self.body if not lit.is_magic)

    def vars(self) -> list[Var]:
        """Distinct variables in order of first occurrence."""
        seen = {}
        for lit in (self.head,) + self.body:
            for a in lit.args:
                if type(a) is Var and a not in seen:
                    seen[a] = None
        return list(seen)

    def key(self):
        return (self.head.key(), tuple(lit.key() for lit in self.body))

    def is_ground(self) -> bool:
        return not self.vars()


def _assign(lit: Literal, mapping: dict, next_id: int):
    """Key of ``lit`` after numbering its unseen variables from ``next_id``."""
    new = None
    keys = []
    nid = next_id
    for a in lit.args:
        if type(a) is Var:
            idx = mapping.get(a)
            if idx is None and new is not None:
                idx = new.get(a)
            if idx is None:
                if new is None:
                    new = {}
                idx = new[a] = nid
                nid += 1
            keys.append((0, idx))
        else:
            keys.append((1, const_key(a)))
    key = (1 if lit.pred == MAGIC else 0, lit.pred, len(lit.args), tuple(keys))
    return key, new, nid


_canon_cache: dict = {}


def canonicalize(c: Clause) -> Clause:
    """Rename variables and order the body so that renamings coincide.

    Head variables are numbered by position.  Body literals are ordered by
    the lexicographically least sorted encoding over all renamings of the
    remaining variables, which also numbers them by first occurrence.
    """
    hit = _canon_cache.get(c)
    if hit is not None:
        return hit
    mapping: dict = {}
    nid = 0
    for a in c.head.args:
        if type(a) is Var and a not in mapping:
            mapping[a] = nid
            nid += 1
    body = list(dict.fromkeys(c.body))
    best: list = [None, None]  # keys, mapping

    def search(mapping, nid, remaining, acc):
        if not remaining:
            if best[0] is None or acc < best[0]:
                best[0] = list(acc)
                best[1] = mapping
            return
        cands = []
        for i, lit in enumerate(remaining):
            key, new, nid2 = _assign(lit, mapping, nid)
            cands.append((key, i, new, nid2))
        low = min(k for k, _, _, _ in cands)
        if best[0] is not None:
            prefix = acc + [low]
            if prefix > best[0][:len(prefix)]:
                return
        for key, i, new, nid2 in cands:
            if key != low:
                continue
            m = mapping if not new else {**mapping, **new}
            search(m, nid2, remaining[:i] + remaining[i + 1:], acc + [key])

    search(mapping, nid, body, [])
    final = best[1]
    theta = {v: Var(i) for v, i in final.items()}
    head = Literal(c.head.pred, tuple(theta.get(a, a) if type(a) is Var else a
                                      for a in c.head.args))
    new_body = [Literal(l.pred, tuple(theta[a] if type(a) is Var else a for a in l.args))
                for l in body]
    new_body.sort(key=Literal.key)
    out = Clause(head, new_body)
    _canon_cache[c] = out
    _canon_cache[out] = out
    return out


def apply(c: Clause, theta: dict) -> Clause:
    """Simultaneously replace variables by the terms ``theta`` maps them to.

    Keys may be :class:`Var` objects or plain variable indices.
    """
    if not theta:
        return c

    def sub(t):
        if type(t) is Var:
            if t in theta:
                return theta[t]
            return theta.get(t.index, t)
        return t

    def sub_lit(lit):
        return Literal(lit.pred, tuple(sub(a) for a in lit.args))

    body = []
    for lit in c.body:
        new = sub_lit(lit)
        if new.is_magic and type(new.args[0]) is not Var:
            continue  # a magic variable bound to a constant is no longer magic
        body.append(new)
    return Clause(sub_lit(c.head), body)


# --- subsumption -----------------------------------------------------------

def _match_term(t1, t2, theta: dict, eps: float) -> bool:
    if type(t1) is Var:
        bound = theta.get(t1)
        if bound is None:
            theta[t1] = t2
            return True
        if type(bound) is Var or type(t2) is Var:
            return bound == t2
        return const_eq(bound, t2, eps)
    if type(t2) is Var:
        return False
    return const_eq(t1, t2, eps)


def _match_lit(l1: Literal, l2: Literal, theta: dict, eps: float):
    """Extend ``theta`` so that ``l1 theta == l2``; return the new vars or None."""
    added = []
    for a1, a2 in zip(l1.args, l2.args):
        if type(a1) is Var and a1 not in theta:
            theta[a1] = a2
            added.append(a1)
        elif not _match_term(a1, a2, theta, eps):
            for v in added:
                del theta[v]
            return None
    return added


def _signature(c: Clause):
    return frozenset((l.pred, len(l.args)) for l in c.body)


def theta_subsumes(c1: Clause, c2: Clause, eps: float = DEFAULT_EPSILON) -> bool:
    """True iff some substitution maps ``c1`` into a subset of ``c2``.

    Heads match heads and body literals match body literals; a magic literal
    can only match a magic literal.
    """
    if c1.head.pred != c2.head.pred or len(c1.head.args) != len(c2.head.args):
        return False
    if not _signature(c1) <= _signature(c2):
        return False
    theta: dict = {}
    if _match_lit(c1.head, c2.head, theta, eps) is None:
        return False
    by_pred: dict = {}
    for lit in set(c2.body):
        by_pred.setdefault((lit.pred, len(lit.args)), []).append(lit)
    todo = sorted(set(c1.body), key=lambda l: len(by_pred[(l.pred, len(l.args))]))

    def search(i):
        if i == len(todo):
            return True
        lit = todo[i]
        for cand in by_pred[(lit.pred, len(lit.args))]:
            added = _match_lit(lit, cand, theta, eps)
            if added is None:
                continue
            if search(i + 1):
                return True
            for v in added:
                del theta[v]
        return False

    return search(0)


# --- hypotheses ------------------------------------------------------------

def clause_order(c: Clause):
    return (c.size(), c.key())


class Hypothesis:
    """A set of clauses in canonical order (by size, then encoding).

    Identical clauses may appear more than once only if they contain magic
    variables; each copy then stands for an independent constant.
    """

    __slots__ = ("clauses", "_hash")

    def __init__(self, clauses: Iterable[Clause] = (), *, canonical: bool = False):
        cs = list(clauses) if canonical else [canonicalize(c) for c in clauses]
        cs.sort(key=clause_order)
        out = []
        for c in cs:
            if out and out[-1] == c and not c.magic_vars:
                continue
            out.append(c)
        self.clauses = tuple(out)
        self._hash = hash(self.clauses)

    def __eq__(self, other):
        return type(other) is Hypothesis and self.clauses == other.clauses

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __repr__(self):
        return "Hypothesis(" + " ".join(format_clause(c) for c in self.clauses) + ")"

    def key(self):
        return tuple(clause_order(c) for c in self.clauses)

    @property
    def magic_count(self) -> int:
        return sum(len(c.magic_vars) for c in self.clauses)

    def head_preds(self) -> set:
        return {(c.head.pred, len(c.head.args)) for c in self.clauses}


def program_subsumes(h1, h2, eps: float = DEFAULT_EPSILON) -> bool:
    """``h1`` subsumes ``h2``: every clause of ``h2`` is subsumed by one of ``h1``."""
    c1s = list(h1)
    return all(any(theta_subsumes(c1, c2, eps) for c1 in c1s) for c2 in h2)


def hypothesis_size(h) -> int:
    return sum(c.size() for c in h)


def clause_is_recursive(c: Clause, heads: set | None = None) -> bool:
    heads = heads if heads is not None else {(c.head.pred, len(c.head.args))}
    return any((l.pred, len(l.args)) in heads for l in c.body if not l.is_magic)


def is_recursive(h) -> bool:
    clauses = list(h)
    heads = {(c.head.pred, len(c.head.args)) for c in clauses}
    return any(clause_is_recursive(c, heads) for c in clauses)


# --- rendering -------------------------------------------------------------

def var_name(i: int) -> str:
    letter = chr(ord("A") + i % 26)
    return letter if i < 26 else f"{letter}{i // 26}"


_ATOM_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def format_const(c) -> str:
    t = type(c)
    if t is int:
        return str(c)
    if t is float:
        return repr(c)
    if t is tuple:
        return "[" + ",".join(format_const(x) for x in c) + "]"
    if c and c[0].islower() and set(c) <= _ATOM_CHARS:
        return c
    return "'" + c.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_term(t, names: dict | None = None) -> str:
    if type(t) is Var:
        if names is not None:
            return names[t]
        return var_name(t.index)
    return format_const(t)


def format_literal(lit: Literal, names: dict | None = None) -> str:
    if not lit.args:
        return lit.pred
    return f"{lit.pred}(" + ",".join(format_term(a, names) for a in lit.args) + ")"


def display_body(c: Clause) -> list[Literal]:
    """Body in reading order: recursive calls after other literals, magic last."""
    head = (c.head.pred, len(c.head.args))

    def rank(lit):
        if lit.is_magic:
            return 2
        return 1 if (lit.pred, len(lit.args)) == head else 0

    return sorted(c.body, key=rank)


def format_clause(c: Clause) -> str:
    body = display_body(c)
    names = {}
    for lit in (c.head, *body):
        for a in lit.args:
            if type(a) is Var and a not in names:
                names[a] = var_name(len(names))
    head = format_literal(c.head, names)
    if not body:
        return head + "."
    return head + ":-" + ",".join(format_literal(l, names) for l in body) + "."


def format_hypothesis(h) -> str:
    return "\n".join(format_clause(c) for c in h)


def clause_from_literals(head: Literal, body: Sequence[Literal]) -> Clause:
    return Clause(head, body)
