"""Builtin relations evaluated natively by the interpreter.

A builtin receives its arguments with ``None`` standing for an unbound
argument and yields complete argument tuples.  Calling it with a binding
pattern outside its declared modes raises :class:`ModeError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .logic import DEFAULT_EPSILON, const_eq


class ModeError(Exception):
    """A builtin was called with too few bound arguments."""


@dataclass(frozen=True)
class Builtin:
    name: str
    arity: int
    fn: Callable
    modes: tuple  # each mode is a frozenset of argument positions that must be bound

    def callable_with(self, bound: Iterable[int]) -> bool:
        b = set(bound)
        return any(m <= b for m in self.modes)


@dataclass
class BuiltinRegistry:
    table: dict = field(default_factory=dict)
    epsilon: float = DEFAULT_EPSILON

    def add(self, name: str, arity: int, fn: Callable, modes) -> None:
        self.table[(name, arity)] = Builtin(name, arity, fn,
                                            tuple(frozenset(m) for m in modes))

    def get(self, name: str, arity: int):
        return self.table.get((name, arity))

    def __contains__(self, key):
        return key in self.table

    def restricted(self, keys) -> "BuiltinRegistry":
        keys = set(keys)
        return BuiltinRegistry({k: v for k, v in self.table.items() if k in keys}, self.epsilon)


def _num(x) -> bool:
    t = type(x)
    return t is int or t is float


def _is_list(x) -> bool:
    return type(x) is tuple


def _require(args, *positions):
    for p in positions:
        if args[p] is None:
            raise ModeError


def _exact_div(a, b):
    """a / b, exact for integers; None when undefined."""
    if b == 0:
        return None
    if type(a) is int and type(b) is int:
        q, r = divmod(a, b)
        return q if r == 0 else None
    return a / b


def make_registry(eps: float = DEFAULT_EPSILON) -> BuiltinRegistry:
    reg = BuiltinRegistry(epsilon=eps)
    register_builtins(reg)
    return reg


def register_builtins(reg: BuiltinRegistry) -> BuiltinRegistry:
    eps = reg.epsilon

    def eq(a, b):
        return const_eq(a, b, eps)

    # lists

    def head(args):
        lst, e = args
        _require(args, 0)
        if _is_list(lst) and lst:
            yield (lst, lst[0])

    def tail(args):
        lst, t = args
        _require(args, 0)
        if _is_list(lst) and lst:
            yield (lst, lst[1:])

    def last(args):
        lst, e = args
        _require(args, 0)
        if _is_list(lst) and lst:
            yield (lst, lst[-1])

    def length(args):
        lst, n = args
        _require(args, 0)
        if _is_list(lst):
            yield (lst, len(lst))

    def empty(args):
        _require(args, 0)
        if args[0] == ():
            yield tuple(args)

    def member(args):
        lst, e = args
        _require(args, 0)
        if _is_list(lst):
            for x in dict.fromkeys(lst):
                yield (lst, x)

    def append(args):
        a, b, c = args
        if a is not None and b is not None:
            if _is_list(a) and _is_list(b):
                yield (a, b, a + b)
        elif c is not None:
            if not _is_list(c):
                return
            if a is not None:
                if _is_list(a) and len(a) <= len(c) and eq(c[:len(a)], a):
                    yield (a, c[len(a):], c)
            elif b is not None:
                if _is_list(b) and len(b) <= len(c) and eq(c[len(c) - len(b):], b):
                    yield (c[:len(c) - len(b)], b, c)
            else:
                for i in range(len(c) + 1):
                    yield (c[:i], c[i:], c)
        else:
            raise ModeError

    def sum_(args):
        lst, n = args
        _require(args, 0)
        if _is_list(lst) and all(_num(x) for x in lst):
            yield (lst, sum(lst))

    # numbers

    def geq(args):
        a, b = args
        _require(args, 0, 1)
        if _num(a) and _num(b) and (a >= b or eq(a, b)):
            yield tuple(args)

    def unary(test):
        def fn(args):
            _require(args, 0)
            x = args[0]
            if _num(x) and test(x):
                yield tuple(args)
        return fn

    def is_int_valued(x):
        return type(x) is int or (type(x) is float and x.is_integer())

    even = unary(lambda x: is_int_valued(x) and int(x) % 2 == 0)
    odd = unary(lambda x: is_int_valued(x) and int(x) % 2 == 1)
    zero = unary(lambda x: x == 0)
    one = unary(lambda x: x == 1)

    def offset(delta, natural):
        # relation b = a + delta over integers
        def fn(args):
            a, b = args
            if a is not None:
                if type(a) is int and (not natural or a >= 0):
                    r = a + delta
                    if not natural or r >= 0:
                        yield (a, r)
            elif b is not None:
                if type(b) is int:
                    r = b - delta
                    if not natural or r >= 0:
                        yield (r, b)
            else:
                raise ModeError
        return fn

    succ = offset(1, True)
    decrement = offset(-1, False)

    def arith(forward, solve_left, solve_right):
        """Relation c = forward(a, b), invertible in either operand."""
        def fn(args):
            a, b, c = args
            known = sum(x is not None for x in args)
            if known < 2:
                raise ModeError
            if not all(_num(x) for x in args if x is not None):
                return
            if a is not None and b is not None:
                r = forward(a, b)
                if r is None:
                    return
                if c is None:
                    yield (a, b, r)
                elif eq(r, c):
                    yield tuple(args)
            elif a is not None:
                r = solve_right(a, c)
                if r is not None:
                    yield (a, r, c)
            else:
                r = solve_left(b, c)
                if r is not None:
                    yield (r, b, c)
        return fn

    add = arith(lambda a, b: a + b, lambda b, c: c - b, lambda a, c: c - a)
    subtract = arith(lambda a, b: a - b, lambda b, c: c + b, lambda a, c: a - c)
    mult = arith(lambda a, b: a * b, lambda b, c: _exact_div(c, b), lambda a, c: _exact_div(c, a))
    _div3 = arith(lambda a, b: _exact_div(a, b), lambda b, c: b * c, lambda a, c: _exact_div(a, c))

    def div(args):
        a, b, c = args
        if a is not None and b is None and c is None:
            # enumerate positive exact divisors of a non-zero integer
            if type(a) is not int or a == 0:
                return
            n = abs(a)
            for d in range(1, n + 1):
                if n % d == 0:
                    yield (a, d, a // d)
            return
        yield from _div3(args)

    def square(args):
        a, b = args
        if a is not None:
            if _num(a):
                r = a * a
                if b is None:
                    yield (a, r)
                elif _num(b) and eq(r, b):
                    yield tuple(args)
        elif b is not None:
            if not _num(b) or b < 0:
                return
            if type(b) is int:
                r = math.isqrt(b)
                if r * r != b:
                    return
            else:
                r = math.sqrt(b)
            yield (r, b)
            if r != 0:
                yield (-r, b)
        else:
            raise ModeError

    one_bound = [{0}]
    reg.add("head", 2, head, one_bound)
    reg.add("tail", 2, tail, one_bound)
    reg.add("last", 2, last, one_bound)
    reg.add("length", 2, length, one_bound)
    reg.add("empty", 1, empty, one_bound)
    reg.add("member", 2, member, one_bound)
    reg.add("sum", 2, sum_, one_bound)
    reg.add("append", 3, append, [{0, 1}, {2}])
    reg.add("geq", 2, geq, [{0, 1}])
    for name, fn in [("even", even), ("odd", odd), ("zero", zero), ("one", one)]:
        reg.add(name, 1, fn, one_bound)
    reg.add("succ", 2, succ, [{0}, {1}])
    reg.add("decrement", 2, decrement, [{0}, {1}])
    two_of_three = [{0, 1}, {0, 2}, {1, 2}]
    reg.add("add", 3, add, two_of_three)
    reg.add("subtract", 3, subtract, two_of_three)
    reg.add("mult", 3, mult, two_of_three)
    reg.add("div", 3, div, two_of_three + [{0}])
    reg.add("square", 2, square, [{0}, {1}])
    return reg


def call(builtin: Builtin, args: list) -> Iterator[tuple]:
    return builtin.fn(args)
