"""Command-line front end: run simulations, reproduce the golden traces,
dump schedules, and verify against the independent oracles.

Exit codes: 0 success, 1 verification or golden mismatch, 2 usage or
command-file parse errors.
"""

from __future__ import annotations

import argparse
import difflib
import json
import random
import sys
from dataclasses import dataclass
from itertools import islice
from typing import Callable, Iterable, Optional

from . import golden
from .checks import VerifiedRun
from .commands import (Command, CommandKind, CommandSyntaxError, OracleCounter,
                       all_inc, parse_command_text, random_commands)
from .engine import Machine, Rule
from .realtime import RealTimeMachine
from .schedule import (binary_carry_schedule, iter_tour_infinity, render_permutation,
                       simulate_permutation, tour_infinity)

OK = 0
FAIL = 1
USAGE = 2


@dataclass
class TraceRecord:
    step: int
    rule: Rule
    mirrored: bool
    injected: bool
    window: str

    def text(self) -> str:
        mark = "*" if self.injected else " "
        side = "mirrored" if self.mirrored else "as-is   "
        return f"step {self.step:>7}  rule {self.rule.value} {side} {mark} {self.window}"

    def json(self) -> str:
        return json.dumps({
            "step": self.step,
            "rule": f"R{self.rule.value}",
            "mirrored": self.mirrored,
            "injected": self.injected,
            "window": self.window,
        })


def trace_run(machine_factory: Callable[[], Machine],
              source_factory: Callable[[], Optional[Iterable[Command]]],
              n: int, window: Optional[tuple[int, int]] = None,
              ) -> tuple[list[TraceRecord], Machine, tuple[int, int]]:
    """Run n steps twice: once to size the display window from the final
    nonblank extent (as the published displays do), once to render."""
    if window is None:
        probe = machine_factory()
        probe.run_steps(n, source=source_factory())
        lo, hi = probe.tape.nonblank_extent()
        window = (lo - 2, hi + 2)
    machine = machine_factory()
    source = source_factory()
    pull = iter(source) if source is not None else None
    held = None
    exhausted = source is None
    records = []
    for step in range(1, n + 1):
        if not exhausted:
            held, done = machine._admit(pull, held)
            exhausted = done
        out = machine.step()
        records.append(TraceRecord(step, out.rule, out.mirrored, out.injected,
                                   machine.tape.render(*window)))
    return records, machine, window


def _source_factory(args, k: int) -> Callable[[], Optional[Iterable[Command]]]:
    if args.commands:
        with open(args.commands, encoding="utf-8") as fh:
            text = fh.read()
        fixed = parse_command_text(text, k=k)
        return lambda: iter(fixed)
    preset = args.preset
    if preset == "all-inc":
        return lambda: all_inc()
    if preset == "random":
        return lambda: random_commands(random.Random(args.seed), k)
    return lambda: None


def _print_stats(machine: Machine) -> None:
    print(f"steps:              {machine.step_count}")
    print(f"injections:         {machine.injections}")
    print(f"commands consumed:  {machine.consumed}")
    print(f"max |digit|:        {machine.max_abs_digit}")
    if machine.tape.ghosts is not None:
        print(f"max position:       {machine.max_position}")
    print(f"max injection gap:  {machine.max_injection_gap}")


def cmd_run(args) -> int:
    try:
        source_factory = _source_factory(args, args.k)
    except CommandSyntaxError as exc:
        print(f"{args.commands}: {exc}", file=sys.stderr)
        return USAGE
    if args.mode == "delay1":
        return _run_delay1(args, source_factory)
    machine_factory = lambda: Machine(args.k, args.radix, ghost=args.ghost)
    if args.steps == 0 or not args.trace:
        machine = machine_factory()
        machine.run_steps(args.steps, source=source_factory())
        print(machine.tape.render_extent())
        if args.stats:
            _print_stats(machine)
        return OK
    records, machine, _ = trace_run(machine_factory, source_factory, args.steps)
    for rec in records:
        print(rec.json() if args.format == "jsonl" else rec.text())
    if args.stats:
        _print_stats(machine)
    return OK


def _run_delay1(args, source_factory) -> int:
    machine = RealTimeMachine(args.k, args.radix)
    source = source_factory()
    pull = iter(source) if source is not None else iter(())
    for step in range(1, args.steps + 1):
        cmd = next(pull, None)
        resp = machine.step(cmd)
        if args.trace:
            fields = {"step": step, "command": str(cmd) if cmd else None,
                      "response": resp.name if resp is not None else None}
            print(json.dumps(fields) if args.format == "jsonl"
                  else f"step {step:>7}  {fields['command'] or '-':10}"
                       f" -> {fields['response'] or '-'}")
    print(machine.inner.tape.render_extent())
    if args.stats:
        _print_stats(machine.inner)
        print(f"phases:             {machine.phases}")
    return OK


def diff_renders(expected: str, actual: str) -> str:
    return "\n".join(difflib.ndiff(expected.split(), actual.split()))


def check_golden(machine: Machine) -> list[str]:
    """Compare a finished big-run machine against the stored fixtures."""
    problems = []
    actual = machine.tape.render_extent()
    if actual != golden.BIG_RUN_RENDER:
        problems.append("configuration mismatch:\n" + diff_renders(golden.BIG_RUN_RENDER, actual))
    if machine.consumed != golden.BIG_RUN_COMMANDS:
        problems.append(f"consumed {machine.consumed} commands, "
                        f"expected {golden.BIG_RUN_COMMANDS}")
    value = machine.tape.represented_value(0)
    if value != golden.BIG_RUN_COMMANDS:
        problems.append(f"represented value {value}, expected {golden.BIG_RUN_COMMANDS}")
    digits = list(reversed(machine.tape.position_digits(0)))
    while digits and digits[0] == 0:
        digits.pop(0)
    if digits != golden.BIG_RUN_DIGITS_MSB:
        problems.append(f"digit string {digits}, expected {golden.BIG_RUN_DIGITS_MSB}")
    return problems


def cmd_golden(args) -> int:
    records, machine, _ = trace_run(
        lambda: Machine(1, 4, ghost=True), lambda: all_inc(), 6,
        window=golden.SIX_STEP_WINDOW)
    problems = []
    for rec, want_render, (want_rule, want_mirrored) in zip(
            records, golden.SIX_STEP_RENDERS, golden.SIX_STEP_RULES):
        if rec.window != want_render or rec.rule != want_rule or rec.mirrored != want_mirrored:
            problems.append(f"six-step trace, step {rec.step}:\n"
                            + diff_renders(want_render, rec.window))
    print(f"six-step trace: {'ok' if not problems else 'MISMATCH'}")
    machine = Machine(1, 4, ghost=True)
    machine.run_steps(golden.BIG_RUN_STEPS, source=all_inc())
    big_problems = check_golden(machine)
    print(f"{golden.BIG_RUN_STEPS}-step configuration: "
          f"{'ok' if not big_problems else 'MISMATCH'}")
    problems += big_problems
    for p in problems:
        print(p, file=sys.stderr)
    return FAIL if problems else OK


def cmd_schedule(args) -> int:
    did = False
    if args.carry:
        print(" ".join(map(str, binary_carry_schedule(args.carry))))
        did = True
    if args.moves:
        for idx, mv in enumerate(tour_infinity(args.moves).moves, 1):
            lvl = f"({mv.level})" if mv.level else ""
            print(f"{idx:>6}  {mv.kind.name}{lvl}  "
                  f"{'right' if mv.direction > 0 else 'left'}")
        did = True
    if args.levels:
        trace = tour_infinity(args.levels)
        for lvl, idx in trace.opportunities():
            print(f"move {idx:>6}: {lvl}-opportunity")
        did = True
    if args.permute is not None:
        cells = simulate_permutation(args.permute, n_cells=args.permute_cells)
        print(render_permutation(cells) + " ...")
        did = True
    if not did:
        print("nothing requested; see schedule --help", file=sys.stderr)
        return USAGE
    return OK


def cmd_verify(args) -> int:
    try:
        source_factory = _source_factory(args, args.k)
    except CommandSyntaxError as exc:
        print(f"{args.commands}: {exc}", file=sys.stderr)
        return USAGE
    if args.mode == "delay1":
        return _verify_delay1(args, source_factory)
    machine = Machine(args.k, args.radix, ghost=True)
    deep_every = max(1, args.steps // 200)
    run = VerifiedRun(machine, source_factory(), deep_every=deep_every)
    if args.corrupt_at:
        run.corrupt_at(args.corrupt_at)
    run.run(args.steps)
    for v in run.violations[:20]:
        print(v, file=sys.stderr)
    print(f"verify: {args.steps} steps, {len(run.violations)} violation(s)")
    return FAIL if run.violations else OK


def _verify_delay1(args, source_factory) -> int:
    machine = RealTimeMachine(args.k, args.radix)
    oracle = OracleCounter(args.k)
    source = source_factory()
    pull = iter(source) if source is not None else iter(())
    violations = []
    delays: dict[int, int] = {}
    expected: Optional[object] = None
    for step in range(1, args.steps + 1):
        cmd = next(pull, None)
        got = machine.step(cmd)
        if got != expected:
            violations.append(f"step {step}: response {got}, oracle expected {expected}")
            if len(violations) > 20:
                break
        if expected is not None:
            delays[1] = delays.get(1, 0) + 1
        expected = oracle.apply(cmd) if cmd is not None else None
    if machine.counts() != oracle.values:
        violations.append(f"final counts {machine.counts()} != oracle {oracle.values}")
    for v in violations[:20]:
        print(v, file=sys.stderr)
    print(f"verify delay1: {args.steps} steps, {len(violations)} violation(s), "
          f"delay histogram {delays}")
    return FAIL if violations else OK


def cmd_stats(args) -> int:
    args.trace = False
    args.stats = True
    return cmd_run(args)


def _add_run_options(p, steps_default=100):
    p.add_argument("--k", type=int, default=1, help="number of counters")
    p.add_argument("--radix", type=int, default=4)
    p.add_argument("--steps", type=int, default=steps_default)
    p.add_argument("--preset", choices=["all-inc", "random", "none"], default="all-inc")
    p.add_argument("--commands", metavar="FILE", help="command file (one per line)")
    p.add_argument("--seed", type=int, default=0, help="seed for --preset random")
    p.add_argument("--mode", choices=["raw", "delay1"], default="raw")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tapecount",
        description="Real-time multicounter simulation on a single tape.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a simulation, optionally tracing each step")
    _add_run_options(p)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--format", choices=["text", "jsonl"], default="text")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--ghost", action="store_true", help="track true position numbers")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("golden", help="reproduce the published six-step and "
                                      "2,980,000-step configurations")
    p.set_defaults(func=cmd_golden)

    p = sub.add_parser("schedule", help="print schedule-oracle output")
    p.add_argument("--carry", type=int, metavar="N", help="binary carry schedule prefix")
    p.add_argument("--moves", type=int, metavar="N", help="first N permutation moves")
    p.add_argument("--levels", type=int, metavar="N", help="opportunity levels over N moves")
    p.add_argument("--permute", type=int, metavar="N", help="position layout after N moves")
    p.add_argument("--permute-cells", type=int, default=8)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("verify", help="run with every oracle attached")
    _add_run_options(p, steps_default=10_000)
    p.add_argument("--corrupt-at", type=int, default=0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="run and print statistics")
    _add_run_options(p)
    p.add_argument("--format", choices=["text", "jsonl"], default="text")
    p.add_argument("--ghost", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
