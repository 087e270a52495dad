"""Shared fixtures. The expensive all-increment reference run and the
expanded move schedule are built once per session and reused by the
acceptance criteria and a few unit tests."""

import time
from array import array
from dataclasses import dataclass, field

import pytest

from tapecount import golden
from tapecount.commands import all_inc
from tapecount.engine import Machine
from tapecount.schedule import iter_tour_infinity

#: Steps at which engine ghost layouts are snapshotted for comparison with
#: the permutation simulator (100 samples over the first million steps).
GHOST_SAMPLE_STEPS = list(range(10_000, 1_000_001, 10_000))


@dataclass
class GoldenRun:
    machine: Machine
    rules: array  # rule | 8*mirrored per step
    carries: tuple  # (steps, tracks, deltas) arrays
    six_records: list  # (rule, mirrored, render) for steps 1..6
    ghost_samples: dict  # step -> (head_offset, tuple of ghosts by offset)
    core_seconds: float = 0.0


@pytest.fixture(scope="session")
def golden_run() -> GoldenRun:
    """The full 2,980,000-step all-increment run, instrumented."""
    machine = Machine(1, 4, ghost=True)
    rules = array("b")
    carries = (array("l"), array("b"), array("b"))
    six = []
    samples = {}
    source = all_inc()
    held = None
    t0 = time.perf_counter()
    for _ in range(6):
        held, _done = machine._admit(source, held)
        out = machine.step()
        rules.append(out.rule.value + (8 if out.mirrored else 0))
        six.append((out.rule.value, out.mirrored,
                    machine.tape.render(*golden.SIX_STEP_WINDOW)))
        if out.carries:
            for t, delta in out.carries:
                carries[0].append(machine.step_count)
                carries[1].append(t)
                carries[2].append(delta)
    for target in GHOST_SAMPLE_STEPS:
        machine.run_steps(target - machine.step_count, source=source,
                          rules_out=rules, carries_out=carries)
        tape = machine.tape
        width = machine.max_position + 3
        ghosts = tuple(
            tape.ghosts[tape.origin + o] if tape.origin + o < len(tape.ghosts) else o - 1
            for o in range(width))
        samples[target] = (machine.head_offset, ghosts)
    machine.run_steps(golden.BIG_RUN_STEPS - machine.step_count, source=source,
                      rules_out=rules, carries_out=carries)
    elapsed = time.perf_counter() - t0
    return GoldenRun(machine, rules, carries, six, samples, elapsed)


@dataclass
class ScheduleArrays:
    """First BIG_RUN_STEPS moves of the process, in flat-array form.

    codes[i]   rule | 8*mirrored of move i+1 (matches engine run codes)
    levels[i]  propagation level of move i+1 (0 none, 1 for 0-tours,
               pushback level + 1 for pushbacks)
    ordinals[i] 1-based ordinal of move i+1 within its level's
               opportunity sequence (0 when levels[i] == 0)
    """

    codes: array
    levels: array
    ordinals: array
    opportunity_counts: list = field(default_factory=list)

    def step_level(self, step: int) -> int:
        return self.levels[step - 1]

    def step_ordinal(self, step: int) -> int:
        return self.ordinals[step - 1]


@pytest.fixture(scope="session")
def schedule_arrays() -> ScheduleArrays:
    n = golden.BIG_RUN_STEPS
    codes = array("b")
    levels = array("b")
    ordinals = array("l")
    counts = [0] * 40
    it = iter_tour_infinity()
    for _ in range(n):
        mv = next(it)
        kind = mv.kind.value
        codes.append(kind + (8 if mv.direction > 0 else 0))
        if kind in (2, 3):
            lvl = 1
        elif kind in (4, 5):
            lvl = mv.level + 1
        else:
            lvl = 0
        levels.append(lvl)
        if lvl:
            counts[lvl] += 1
            ordinals.append(counts[lvl])
        else:
            ordinals.append(0)
    return ScheduleArrays(codes, levels, ordinals, counts)
