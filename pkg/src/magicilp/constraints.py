"""Constraints learned from failed hypotheses, and the store that applies them."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .logic import DEFAULT_EPSILON, FRESH, Hypothesis, format_clause, is_recursive, theta_subsumes


class Kind(enum.Enum):
    SPECIALISATION = "specialisation"
    GENERALISATION = "generalisation"
    REDUNDANCY = "redundancy"
    BANISH = "banish"


@dataclass(frozen=True)
class Constraint:
    kind: Kind
    pattern: Hypothesis


def infer(h: Hypothesis, report, n_pos: int) -> list[Constraint]:
    """Constraints licensed by a complete (untruncated) outcome report."""
    if report.truncated:
        raise ValueError("a truncated report only licenses a banish constraint")
    full = (1 << n_pos) - 1
    rows = list(report.rows())
    if not rows:
        return [Constraint(Kind.REDUNDANCY, h), Constraint(Kind.SPECIALISATION, h)]
    if any(p == full and n == 0 for _, p, n in rows):
        return []
    out = []
    if all(p != full for _, p, _ in rows):
        out.append(Constraint(Kind.SPECIALISATION, h))
    if all(n != 0 for _, _, n in rows):
        out.append(Constraint(Kind.GENERALISATION, h))
    if not out:
        out.append(Constraint(Kind.BANISH, h))
    return out


class _ClauseCache:
    """What is known about one candidate clause against the stored patterns."""
    __slots__ = ("spec_n", "spec", "gen_n", "gen", "red_n", "red")

    def __init__(self):
        self.spec_n = 0
        self.spec = {}      # specialisation id -> pattern clause positions subsuming this one
        self.gen_n = 0
        self.gen = {}       # generalisation id -> pattern clause positions this one covers
        self.red_n = 0
        self.red = False    # some redundancy pattern clause subsumes this one


def _assignable(options: list, magic_positions: frozenset) -> bool:
    """Pick one pattern clause per candidate clause, never reusing a magic one."""
    used = set()

    def rec(i):
        if i == len(options):
            return True
        for j in options[i]:
            if j in magic_positions:
                if j in used:
                    continue
                used.add(j)
                if rec(i + 1):
                    return True
                used.discard(j)
            elif rec(i + 1):
                return True
        return False

    return rec(0)


class ConstraintStore:
    """Constraints partitioned by kind, deduplicated, in insertion order.

    Subsumption results are cached per candidate clause and extended
    incrementally as constraints arrive, so checking a hypothesis costs
    set operations plus the subsumption tests against new patterns only.

    Two refinements keep pruning optimally sound when patterns carry magic
    variables.  A specialisation pattern only prunes a candidate if each of
    the pattern's magic clauses is the image of at most one candidate
    clause, since two candidate clauses may bind its constants differently.
    A generalisation pattern's magic clause must reappear verbatim in the
    candidate or be subsumed by a magic-free candidate clause; a candidate
    clause whose own constants feed the pattern's says nothing about it.
    """

    def __init__(self, epsilon: float = DEFAULT_EPSILON):
        self.epsilon = epsilon
        self.by_kind = {k: [] for k in Kind}
        self._seen = set()
        self._banished = set()
        self._cache: dict = {}
        self._pairs: dict = {}
        self._magic_pos: list = []  # per specialisation pattern

    def __len__(self):
        return len(self._seen)

    def __iter__(self):
        for k in Kind:
            for p in self.by_kind[k]:
                yield Constraint(k, p)

    def count(self, kind: Kind) -> int:
        return len(self.by_kind[kind])

    def add(self, constraints) -> int:
        """Store new constraints; return how many were not already present."""
        added = 0
        for c in constraints:
            key = (c.kind, c.pattern)
            if key in self._seen:
                continue
            self._seen.add(key)
            self.by_kind[c.kind].append(c.pattern)
            if c.kind is Kind.BANISH:
                self._banished.add(c.pattern)
            elif c.kind is Kind.SPECIALISATION:
                self._magic_pos.append(frozenset(
                    j for j, pc in enumerate(c.pattern.clauses) if pc.magic_vars))
            added += 1
        return added

    def _subsumes(self, c1, c2) -> bool:
        key = (c1, c2)
        r = self._pairs.get(key)
        if r is None:
            r = self._pairs[key] = theta_subsumes(c1, c2, self.epsilon)
        return r

    def _info(self, c) -> _ClauseCache:
        info = self._cache.get(c)
        if info is None:
            info = self._cache[c] = _ClauseCache()
        return info

    def _spec_hits(self, c) -> dict:
        info = self._info(c)
        pats = self.by_kind[Kind.SPECIALISATION]
        for i in range(info.spec_n, len(pats)):
            hit = [j for j, pc in enumerate(pats[i].clauses) if self._subsumes(pc, c)]
            if hit:
                info.spec[i] = hit
        info.spec_n = len(pats)
        return info.spec

    def _gen_hits(self, c) -> dict:
        info = self._info(c)
        pats = self.by_kind[Kind.GENERALISATION]
        plain = not c.magic_vars
        for i in range(info.gen_n, len(pats)):
            hit = {j for j, pc in enumerate(pats[i].clauses)
                   if pc == c or (plain and self._subsumes(c, pc))}
            if hit:
                info.gen[i] = hit
        info.gen_n = len(pats)
        return info.gen

    def _redundant(self, c) -> bool:
        info = self._info(c)
        pats = self.by_kind[Kind.REDUNDANCY]
        if not info.red:
            for i in range(info.red_n, len(pats)):
                if any(self._subsumes(pc, c) for pc in pats[i]):
                    info.red = True
                    break
        info.red_n = len(pats)
        return info.red

    def clause_redundant(self, c) -> bool:
        """A non-recursive hypothesis containing ``c`` is pruned by redundancy."""
        return self._redundant(c)

    def violates(self, h: Hypothesis) -> bool:
        if h in self._banished:
            return True
        clauses = h.clauses
        recursive = is_recursive(h)
        if not recursive and any(self._redundant(c) for c in clauses):
            return True
        if self.by_kind[Kind.SPECIALISATION]:
            hits = [self._spec_hits(c) for c in clauses]
            common = set(hits[0])
            for hd in hits[1:]:
                common &= hd.keys()
            for i in sorted(common):
                if _assignable([hd[i] for hd in hits], self._magic_pos[i]):
                    return True
        if not recursive and self.by_kind[Kind.GENERALISATION]:
            covered: dict = {}
            for c in clauses:
                for i, hit in self._gen_hits(c).items():
                    covered.setdefault(i, set()).update(hit)
            pats = self.by_kind[Kind.GENERALISATION]
            for i, hit in covered.items():
                if len(hit) == len(pats[i].clauses):
                    return True
        return False

    def dump(self) -> str:
        lines = []
        for con in self:
            body = " ".join(format_clause(c) for c in con.pattern)
            lines.append(f"{con.kind.value}: {body}")
        return "\n".join(lines) + ("\n" if lines else "")


def has_fresh(binding) -> bool:
    return any(x == FRESH for x in binding)
