"""Command-line front end.

Exit codes: 0 on success, 1 when no solution is found or a benchmark check
fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import bench
from .engine import learn, score_task
from .generator import space_bound
from .parsing import ParseError
from .taskio import (EngineConfig, ValidationError, parse_program, parse_task, render_program,
                     write_stats, write_task)
from .tasks import FAMILIES, family_defaults, gen_task

_INPUT_ERRORS = (ParseError, ValidationError, ValueError, FileNotFoundError, bench.SuiteError)


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _config(args) -> EngineConfig:
    given = {"timeout": args.timeout, "epsilon": args.epsilon,
             "solver_epsilon": args.solver_epsilon,
             "max_instantiations": args.max_instantiations, "seed": args.seed}
    return EngineConfig(**{k: v for k, v in given.items() if v is not None})


def cmd_learn(args) -> int:
    try:
        task = parse_task(args.task, _config(args))
    except _INPUT_ERRORS as e:
        return _fail(str(e))
    result = learn(task)
    if result.program is None:
        print("no solution")
    else:
        print(render_program(result.program), end="")
    if args.stats:
        try:
            write_stats(result, args.stats)
        except OSError as e:
            return _fail(f"cannot write stats: {e}")
    return 0 if result.program is not None else 1


def cmd_eval(args) -> int:
    try:
        task = parse_task(args.task)
        program = parse_program(Path(args.program).read_text())
        acc = score_task(program, task)
    except (*_INPUT_ERRORS, OSError) as e:
        return _fail(str(e))
    print(f"{acc:.4f}")
    return 0


def cmd_bench(args) -> int:
    try:
        if args.suite == "default":
            entries = bench.parse_suite(bench.default_suite_text())
        else:
            path = Path(args.suite)
            entries = bench.parse_suite(path.read_text(), path.parent)
    except (*_INPUT_ERRORS, OSError) as e:
        return _fail(str(e))
    if not entries:
        print("empty suite")
        return 0
    print(bench.HEADER)
    try:
        rows = bench.run_suite(entries, on_row=lambda r: print(bench.format_row(r), flush=True))
    except _INPUT_ERRORS as e:
        return _fail(str(e))
    failed = [r for r in rows if not r.passed]
    for r in failed:
        for msg in r.failures:
            print(f"{r.entry.name}: {msg}")
    print(f"{len(rows) - len(failed)}/{len(rows)} passed")
    return 1 if failed else 0


def cmd_space(args) -> int:
    named = {"--Db": args.Db, "--Dh": args.Dh, "--vars": args.vars, "--arity": args.arity,
             "--max-body": args.max_body, "--max-clauses": args.max_clauses}
    bad = [k for k, v in named.items() if v <= 0]
    if bad:
        return _fail(f"{', '.join(bad)} must be positive")
    if args.constants < 0:
        return _fail("--constants must not be negative")
    plain = space_bound(args.Db, args.Dh, args.vars, args.arity, args.max_body, args.max_clauses)
    unary = space_bound(args.Db + args.constants, args.Dh, args.vars, args.arity,
                        args.max_body, args.max_clauses)
    print(f"magic:    {plain}")
    print(f"unary:    {unary}")
    print(f"ratio:    {Fraction(unary, plain)}")
    return 0


def cmd_gen(args) -> int:
    params = {}
    try:
        defaults = family_defaults(args.family)
        for item in args.param or []:
            key, sep, value = item.partition("=")
            if not sep or key not in defaults:
                raise ValueError(f"bad parameter {item!r}; known: {', '.join(sorted(defaults))}")
            params[key] = type(defaults[key])(value)
        g = gen_task(args.family, params, args.seed)
    except _INPUT_ERRORS as e:
        return _fail(str(e))
    write_task(g.task, args.out)
    print(f"wrote {args.family} task to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magicilp", description="Learn logic programs with magic values.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("learn", help="learn a program for a task directory")
    s.add_argument("--task", required=True, help="directory with bias.pl, bk.pl and exs.pl")
    s.add_argument("--timeout", type=float, help="seconds before giving up (default 600)")
    s.add_argument("--epsilon", type=float, help="task tolerance for reals (default 1e-3)")
    s.add_argument("--solver-epsilon", type=float, help="matching tolerance inside the solver (default 1e-6)")
    s.add_argument("--max-instantiations", type=int, help="cap on bindings per candidate (default 10000)")
    s.add_argument("--stats", help="write run statistics as JSON to this path")
    s.add_argument("--seed", type=int, help="recorded in the config; the search itself is deterministic")
    s.set_defaults(fn=cmd_learn)

    s = sub.add_parser("eval", help="balanced accuracy of a program on a task's examples")
    s.add_argument("--task", required=True)
    s.add_argument("--program", required=True)
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("bench", help="run a benchmark suite")
    s.add_argument("--suite", default="default", help="suite file, or `default` for the shipped one")
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("space", help="hypothesis-space bounds with and without unary constants")
    for flag in ("--Db", "--Dh", "--vars", "--arity", "--max-body", "--max-clauses", "--constants"):
        s.add_argument(flag, type=int, required=True)
    s.set_defaults(fn=cmd_space)

    s = sub.add_parser("gen", help="write a generated benchmark task to a directory")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
