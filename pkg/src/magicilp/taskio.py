"""Task files, engine configuration, learned programs and statistics."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .builtins import BuiltinRegistry, make_registry
from .interpreter import FactBase, ResourceBudget
from .logic import DEFAULT_EPSILON, Hypothesis, Literal, format_const, format_hypothesis
from .parsing import ParseError, Compound, parse_clauses, read_sentences, to_atom

TASK_EPSILON = 1e-3


class ValidationError(Exception):
    pass


@dataclass(frozen=True)
class PredDecl:
    name: str
    arity: int
    types: tuple | None = None
    directions: tuple | None = None

    @property
    def key(self):
        return (self.name, self.arity)


@dataclass(frozen=True)
class MagicSetting:
    kind: str = "all"  # all | types | arguments
    values: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("all", "types", "arguments"):
            raise ValueError(f"unknown magic setting {self.kind!r}")


@dataclass
class Bias:
    head_preds: tuple = ()
    body_preds: tuple = ()
    builtins_enabled: frozenset = frozenset()
    max_vars: int = 6
    max_body: int = 6
    max_clauses: int = 2
    max_magic: int = 4
    magic_setting: MagicSetting = field(default_factory=MagicSetting)
    enable_recursion: bool = False

    def decl(self, name, arity) -> PredDecl | None:
        for d in self.head_preds + self.body_preds:
            if d.name == name and d.arity == arity:
                return d
        return None

    @property
    def target(self) -> PredDecl:
        return self.head_preds[0]

    def validate(self) -> None:
        for name in ("max_vars", "max_body", "max_clauses", "max_magic"):
            v = getattr(self, name)
            if type(v) is not int or v < 0:
                raise ValidationError(f"{name} must be a natural number, got {v!r}")
        if self.max_vars < 1 or self.max_clauses < 1:
            raise ValidationError("max_vars and max_clauses must be at least 1")
        if len(self.head_preds) != 1:
            raise ValidationError("exactly one head_pred is required")
        for d in self.head_preds + self.body_preds:
            if d.types is not None and len(d.types) != d.arity:
                raise ValidationError(f"type declaration of {d.name}/{d.arity} has wrong length")
            if d.directions is not None:
                if len(d.directions) != d.arity:
                    raise ValidationError(f"direction declaration of {d.name}/{d.arity} has wrong length")
                if not set(d.directions) <= {"in", "out"}:
                    raise ValidationError(f"directions of {d.name}/{d.arity} must be in or out")
        ms = self.magic_setting
        if ms.kind == "types":
            used = {t for d in self.head_preds + self.body_preds for t in (d.types or ())}
            for t in ms.values:
                if t not in used:
                    raise ValidationError(f"magic_type({t}) names a type no declaration uses")
        elif ms.kind == "arguments":
            for name, idx in ms.values:
                d = self.decl_by_name(name)
                if d is None:
                    raise ValidationError(f"magic_arg({name},{idx}) names an undeclared predicate")
                if not 1 <= idx <= d.arity:
                    raise ValidationError(f"magic_arg({name},{idx}) index out of range")

    def decl_by_name(self, name) -> PredDecl | None:
        for d in self.head_preds + self.body_preds:
            if d.name == name:
                return d
        return None


@dataclass
class EngineConfig:
    timeout: float = 600.0
    epsilon: float = TASK_EPSILON
    solver_epsilon: float = DEFAULT_EPSILON
    max_instantiations: int = 10_000
    budget: ResourceBudget = field(default_factory=ResourceBudget)
    seed: int = 0

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if not self.epsilon > 0 or not self.solver_epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_instantiations < 1:
            raise ValueError("max_instantiations must be positive")


@dataclass
class TaskSpec:
    bias: Bias
    facts: FactBase
    pos: list
    neg: list
    config: EngineConfig = field(default_factory=EngineConfig)
    builtins: BuiltinRegistry | None = None

    def __post_init__(self):
        if self.builtins is None:
            self.builtins = make_registry(self.config.solver_epsilon).restricted(
                self.bias.builtins_enabled)


@dataclass
class Stats:
    candidates_generated: int = 0
    candidates_tested: int = 0
    instantiations_tested: int = 0
    constraints_specialisation: int = 0
    constraints_generalisation: int = 0
    constraints_redundancy: int = 0
    constraints_banish: int = 0
    elapsed_ms: int = 0
    budget_exceeded_count: int = 0


@dataclass
class LearnResult:
    program: Hypothesis | None
    size: int
    status: str  # solved | exhausted | timeout
    stats: Stats

    def to_dict(self) -> dict:
        d = {"program": render_program(self.program) if self.program is not None else None,
             "size": self.size,
             "status": self.status}
        d.update(asdict(self.stats))
        return d


# --- parsing ---------------------------------------------------------------

def _seq(value, line):
    """A declaration argument that may be a single name or a parenthesised tuple."""
    if isinstance(value, str):
        return (value,)
    if isinstance(value, (list, tuple)) and all(isinstance(x, str) for x in value):
        return tuple(value)
    raise ParseError(line, f"expected a name or a tuple of names, got {value!r}")


def _nat(value, line, what):
    if type(value) is not int or value < 0:
        raise ParseError(line, f"{what} expects a natural number")
    return value


def parse_bias(text: str) -> Bias:
    heads, bodies, types, dirs = [], [], {}, {}
    builtins = set()
    limits = {}
    magic_types, magic_args = set(), set()
    recursion = False
    for s in read_sentences(text):
        if s.body:
            raise ParseError(s.line, "bias files contain facts only")
        h = s.head
        a = h.args
        key = (h.name, len(a))
        if key in (("head_pred", 2), ("body_pred", 2), ("builtin", 2)):
            if not isinstance(a[0], str) or type(a[1]) is not int or a[1] < 0:
                raise ParseError(s.line, f"{h.name} expects a name and an arity")
            if h.name == "builtin":
                builtins.add((a[0], a[1]))
            elif h.name == "head_pred":
                heads.append((a[0], a[1]))
            elif h.name == "body_pred":
                bodies.append((a[0], a[1]))
        elif key == ("type", 2) or key == ("direction", 2):
            if not isinstance(a[0], str):
                raise ParseError(s.line, f"{h.name} expects a predicate name")
            (types if h.name == "type" else dirs)[a[0]] = _seq(a[1], s.line)
        elif key in (("max_vars", 1), ("max_body", 1), ("max_clauses", 1), ("max_magic", 1)):
            limits[h.name] = _nat(a[0], s.line, h.name)
        elif key == ("magic_type", 1):
            if not isinstance(a[0], str):
                raise ParseError(s.line, "magic_type expects a type name")
            magic_types.add(a[0])
        elif key == ("magic_arg", 2):
            if not isinstance(a[0], str) or type(a[1]) is not int:
                raise ParseError(s.line, "magic_arg expects a predicate name and an index")
            magic_args.add((a[0], a[1]))
        elif key == ("enable_recursion", 0):
            recursion = True
        else:
            raise ValidationError(f"line {s.line}: unknown bias directive {h.name}/{len(a)}")
    if magic_types and magic_args:
        raise ValidationError("magic_type and magic_arg cannot be combined")
    if magic_types:
        setting = MagicSetting("types", frozenset(magic_types))
    elif magic_args:
        setting = MagicSetting("arguments", frozenset(magic_args))
    else:
        setting = MagicSetting()
    for name, arity in sorted(builtins):
        if (name, arity) not in bodies:
            bodies.append((name, arity))

    def decls(pairs):
        out = []
        for name, arity in dict.fromkeys(pairs):
            t = types.get(name)
            d = dirs.get(name)
            out.append(PredDecl(name, arity, t, d))
        return tuple(out)

    declared = {n for n, _ in heads} | {n for n, _ in bodies}
    for name in list(types) + list(dirs):
        if name not in declared:
            raise ValidationError(f"type or direction given for undeclared predicate {name}")
    bias = Bias(head_preds=decls(heads), body_preds=decls(bodies),
                builtins_enabled=frozenset(builtins), magic_setting=setting,
                enable_recursion=recursion, **limits)
    bias.validate()
    reg = make_registry()
    for key in bias.builtins_enabled:
        if key not in reg:
            raise ValidationError(f"unknown builtin {key[0]}/{key[1]}")
    return bias


def parse_facts(text: str) -> list[Literal]:
    out = []
    for s in read_sentences(text):
        if s.body:
            raise ValidationError(f"line {s.line}: background knowledge must be ground facts")
        out.append(to_atom(s.head, s.line))
    return out


def parse_examples(text: str):
    pos, neg = [], []
    for s in read_sentences(text):
        h = s.head
        if s.body or h.name not in ("pos", "neg") or len(h.args) != 1:
            raise ValidationError(f"line {s.line}: examples are pos/1 or neg/1 facts")
        atom = h.args[0]
        if isinstance(atom, str):
            atom = Compound(atom, ())
        if not isinstance(atom, Compound):
            raise ParseError(s.line, "an example must wrap an atom")
        (pos if h.name == "pos" else neg).append(to_atom(atom, s.line))
    return pos, neg


def build_task(bias: Bias, facts, pos, neg, config: EngineConfig | None = None) -> TaskSpec:
    config = config or EngineConfig()
    bias.validate()
    target = bias.target
    for atom in list(pos) + list(neg):
        if (atom.pred, len(atom.args)) != target.key:
            raise ValidationError(f"example {atom.pred}/{len(atom.args)} does not match head_pred "
                                  f"{target.name}/{target.arity}")
    pos = list(dict.fromkeys(pos))
    neg = list(dict.fromkeys(neg))
    overlap = set(pos) & set(neg)
    if overlap:
        raise ValidationError(f"{len(overlap)} example(s) are both positive and negative")
    fb = FactBase()
    for atom in facts:
        key = (atom.pred, len(atom.args))
        if key == target.key:
            raise ValidationError("background knowledge may not define the target predicate")
        if key in bias.builtins_enabled:
            raise ValidationError(f"background facts for builtin {key[0]}/{key[1]}")
        fb.add(atom)
    return TaskSpec(bias, fb, pos, neg, config)


def parse_task(path, config: EngineConfig | None = None) -> TaskSpec:
    d = Path(path)
    if not d.is_dir():
        raise FileNotFoundError(f"task directory {d} does not exist")
    texts = {}
    for name in ("bias.pl", "bk.pl", "exs.pl"):
        f = d / name
        if not f.is_file():
            raise FileNotFoundError(f"missing {f}")
        texts[name] = f.read_text()
    bias = parse_bias(texts["bias.pl"])
    facts = parse_facts(texts["bk.pl"])
    pos, neg = parse_examples(texts["exs.pl"])
    return build_task(bias, facts, pos, neg, config)


def parse_program(text: str) -> Hypothesis:
    clauses = parse_clauses(text)
    for c in clauses:
        if c.magic_vars:
            raise ValidationError("programs may not contain @magic literals")
    return Hypothesis(clauses)


def render_program(h: Hypothesis) -> str:
    for c in h:
        if c.magic_vars:
            raise ValueError("cannot render a hypothesis with magic literals as a program")
    text = format_hypothesis(h)
    return text + "\n" if text else ""


# --- writing ---------------------------------------------------------------

def format_atom(atom: Literal) -> str:
    if not atom.args:
        return atom.pred
    return atom.pred + "(" + ",".join(format_const(a) for a in atom.args) + ")"


def render_bias(b: Bias) -> str:
    lines = []
    for d in b.head_preds:
        lines.append(f"head_pred({d.name},{d.arity}).")
    for d in b.body_preds:
        if d.key in b.builtins_enabled:
            lines.append(f"builtin({d.name},{d.arity}).")
        else:
            lines.append(f"body_pred({d.name},{d.arity}).")
    for d in b.head_preds + b.body_preds:
        if d.types is not None:
            lines.append(f"type({d.name},({','.join(d.types)})).")
        if d.directions is not None:
            lines.append(f"direction({d.name},({','.join(d.directions)})).")
    for name in ("max_vars", "max_body", "max_clauses", "max_magic"):
        lines.append(f"{name}({getattr(b, name)}).")
    ms = b.magic_setting
    if ms.kind == "types":
        lines += [f"magic_type({t})." for t in sorted(ms.values)]
    elif ms.kind == "arguments":
        lines += [f"magic_arg({p},{i})." for p, i in sorted(ms.values)]
    if b.enable_recursion:
        lines.append("enable_recursion.")
    return "\n".join(lines) + "\n"


def write_task(task: TaskSpec, path) -> None:
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    (d / "bias.pl").write_text(render_bias(task.bias))
    (d / "bk.pl").write_text("".join(format_atom(a) + ".\n" for a in task.facts.atoms()))
    exs = [f"pos({format_atom(a)})." for a in task.pos] + [f"neg({format_atom(a)})." for a in task.neg]
    (d / "exs.pl").write_text("\n".join(exs) + "\n")


def write_stats(result: LearnResult, path) -> None:
    text = json.dumps(result.to_dict(), indent=2) + "\n"
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write(text)
    os.replace(tmp, path)
