"""Benchmark suites: a flat text file of tasks with pass thresholds.

One entry per line::

    name; family(key=value, ...); min_acc; max_secs

The second field may also be a task directory.  Blank lines and lines
starting with ``#`` are ignored.  Family entries are scored on freshly
generated held-out examples, directory entries on their own examples.
"""

from __future__ import annotations

import ast
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .engine import learn, score_task
from .taskio import EngineConfig, parse_task, render_program
from .tasks import FAMILIES, gen_task

_ENTRY = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*\((.*)\)\s*$")


class SuiteError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"suite line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class BenchEntry:
    name: str
    family: str | None
    params: dict
    task_dir: str | None
    min_acc: float
    max_secs: float
    seed: int = 1


@dataclass
class BenchRow:
    entry: BenchEntry
    status: str
    accuracy: float | None
    seconds: float
    size: int
    program: str | None = None
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _parse_params(text: str, line: int) -> dict:
    text = text.strip()
    if not text:
        return {}
    try:
        call = ast.parse(f"f({text})", mode="eval").body
    except SyntaxError as e:
        raise SuiteError(line, f"bad parameter list: {e.msg}") from None
    if call.args:
        raise SuiteError(line, "parameters must be given as key=value")
    out = {}
    for kw in call.keywords:
        try:
            out[kw.arg] = ast.literal_eval(kw.value)
        except ValueError:
            raise SuiteError(line, f"parameter {kw.arg} is not a literal") from None
    return out


def parse_suite(text: str, base: Path | None = None) -> list[BenchEntry]:
    entries = []
    names = set()
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = [p.strip() for p in s.split(";")]
        if len(parts) != 4:
            raise SuiteError(n, "expected `name; family(params); min_acc; max_secs`")
        name, spec, acc, secs = parts
        if not name:
            raise SuiteError(n, "empty entry name")
        if name in names:
            raise SuiteError(n, f"duplicate entry name {name!r}")
        names.add(name)
        try:
            min_acc, max_secs = float(acc), float(secs)
        except ValueError:
            raise SuiteError(n, "min_acc and max_secs must be numbers") from None
        if not 0.0 <= min_acc <= 1.0 or not max_secs > 0:
            raise SuiteError(n, "min_acc must lie in [0, 1] and max_secs be positive")
        m = _ENTRY.match(spec)
        if m and m.group(1) in FAMILIES:
            params = _parse_params(m.group(2), n)
            seed = params.pop("seed", 1)
            entries.append(BenchEntry(name, m.group(1), params, None, min_acc, max_secs, seed))
            continue
        path = Path(spec)
        if base is not None and not path.is_absolute():
            path = base / path
        if not path.is_dir():
            raise SuiteError(n, f"{spec!r} is neither a known family nor a task directory")
        entries.append(BenchEntry(name, None, {}, str(path), min_acc, max_secs))
    return entries


def default_suite_text() -> str:
    return resources.files("magicilp").joinpath("default_suite.txt").read_text()


def run_entry(entry: BenchEntry, config: EngineConfig | None = None) -> BenchRow:
    config = config or EngineConfig(timeout=max(entry.max_secs * 2, 1.0))
    if entry.family is not None:
        g = gen_task(entry.family, entry.params, entry.seed, config)
        task, test_pos, test_neg = g.task, g.test_pos, g.test_neg
    else:
        task = parse_task(entry.task_dir, config)
        test_pos, test_neg = task.pos, task.neg
    t0 = time.monotonic()
    result = learn(task)
    secs = time.monotonic() - t0
    row = BenchRow(entry, result.status, None, secs, result.size)
    if result.program is not None:
        row.program = render_program(result.program)
        if test_pos and test_neg:
            row.accuracy = score_task(result.program, task, test_pos, test_neg)
    if result.program is None:
        row.failures.append(f"no solution ({result.status})")
    elif row.accuracy is None:
        row.failures.append("accuracy undefined without both example classes")
    elif row.accuracy < entry.min_acc:
        row.failures.append(f"accuracy {row.accuracy:.4f} < {entry.min_acc}")
    if secs > entry.max_secs:
        row.failures.append(f"time {secs:.2f}s > {entry.max_secs}s")
    return row


def run_suite(entries, config: EngineConfig | None = None, on_row=None) -> list[BenchRow]:
    rows = []
    for e in entries:
        row = run_entry(e, config)
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return rows


def format_row(row: BenchRow) -> str:
    acc = "-" if row.accuracy is None else f"{row.accuracy:.4f}"
    mark = "ok" if row.passed else "FAIL"
    return f"{row.entry.name:<14} {acc:>8} {row.seconds:>8.2f} {row.size:>5}  {mark}"


HEADER = f"{'task':<14} {'accuracy':>8} {'time':>8} {'size':>5}  check"
