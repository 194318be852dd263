"""A small reader for the logic-program syntax used by task and program files."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .logic import MAGIC, Clause, Literal, Var, check_const


class ParseError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass(frozen=True)
class VarName:
    """A variable as written in the source, before clause-local numbering."""
    name: str


@dataclass(frozen=True)
class Compound:
    name: str
    args: tuple

    @property
    def arity(self):
        return len(self.args)


@dataclass(frozen=True)
class Sentence:
    head: Compound
    body: tuple
    line: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<float>-?\d+\.\d+(?:[eE][+-]?\d+)?|-?\d+[eE][+-]?\d+)
  | (?P<int>-?\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_]*|@magic)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<punct>[()\[\],.|])
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    line = 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            out.append((kind, value, line))
        line += value.count("\n")
        pos = m.end()
    out.append(("eof", "", line))
    return out


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(tok[2], f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def term(self):
        kind, value, line = self.take()
        if kind == "int":
            return int(value)
        if kind == "float":
            return check_const(float(value))
        if kind == "var":
            return VarName(value)
        if kind == "quoted":
            return re.sub(r"\\(.)", r"\1", value[1:-1])
        if kind == "atom":
            if self.peek()[1] == "(":
                self.take("(")
                args = self.args(")")
                return Compound(value, tuple(args))
            return value
        if value == "[":
            items = self.args("]")
            return tuple(items)
        if value == "(":
            items = self.args(")")
            return items[0] if len(items) == 1 else list(items)
        raise ParseError(line, f"unexpected {value or 'end of input'!r}")

    def args(self, close):
        items = []
        if self.peek()[1] == close:
            self.take(close)
            return items
        while True:
            items.append(self.term())
            kind, value, line = self.take()
            if value == close:
                return items
            if value != ",":
                raise ParseError(line, f"expected ',' or {close!r}, found {value!r}")

    def sentence(self):
        line = self.peek()[2]
        head = self.term()
        if isinstance(head, str):
            head = Compound(head, ())
        if not isinstance(head, Compound):
            raise ParseError(line, "clause head must be an atom or compound term")
        body = []
        if self.peek()[0] == "neck":
            self.take()
            while True:
                lit = self.term()
                if isinstance(lit, str):
                    lit = Compound(lit, ())
                if not isinstance(lit, Compound):
                    raise ParseError(self.peek()[2], "body literal must be an atom or compound term")
                body.append(lit)
                if self.peek()[1] == ",":
                    self.take()
                    continue
                break
        self.take(".")
        return Sentence(head, tuple(body), line)


def read_sentences(text: str) -> list[Sentence]:
    r = _Reader(text)
    out = []
    while r.peek()[0] != "eof":
        out.append(r.sentence())
    return out


def ground_value(t, line: int = 0):
    """Convert a parsed term to a constant, rejecting variables and compounds."""
    if isinstance(t, VarName):
        raise ParseError(line, f"variable {t.name} where a constant is required")
    if isinstance(t, Compound):
        raise ParseError(line, f"compound term {t.name}/{t.arity} is not a constant")
    if isinstance(t, list):
        raise ParseError(line, "tuple term is not a constant")
    if isinstance(t, tuple):
        return tuple(ground_value(x, line) for x in t)
    return t


def to_atom(c: Compound, line: int = 0) -> Literal:
    return Literal(c.name, tuple(ground_value(a, line) for a in c.args))


def to_clause(s: Sentence) -> Clause:
    names: dict = {}

    def conv(t):
        if isinstance(t, VarName):
            if t.name == "_":
                v = Var(len(names))
                names[object()] = v
                return v
            if t.name not in names:
                names[t.name] = Var(len(names))
            return names[t.name]
        return ground_value(t, s.line)

    head = Literal(s.head.name, tuple(conv(a) for a in s.head.args))
    body = []
    for b in s.body:
        lit = Literal(b.name, tuple(conv(a) for a in b.args))
        if lit.pred == MAGIC and (len(lit.args) != 1 or type(lit.args[0]) is not Var):
            raise ParseError(s.line, "@magic takes a single variable")
        body.append(lit)
    try:
        return Clause(head, body)
    except ValueError as e:
        raise ParseError(s.line, str(e)) from None


def parse_clauses(text: str) -> list[Clause]:
    return [to_clause(s) for s in read_sentences(text)]


def parse_atom(text: str) -> Literal:
    sents = read_sentences(text if text.rstrip().endswith(".") else text + ".")
    if len(sents) != 1 or sents[0].body:
        raise ParseError(1, "expected a single atom")
    return to_atom(sents[0].head, sents[0].line)
