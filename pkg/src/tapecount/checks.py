"""Brute-force verification oracles and a checked run driver.

Everything here recomputes properties from scratch (ghost-ordered digit
strings, the schedule generator, the big-integer reference counter) and
never trusts the engine's incremental bookkeeping, so these checks stay
independent of the code paths they validate.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .commands import Command, CommandKind, OracleCounter, mutation_delta
from .engine import Machine
from .schedule import Move, iter_tour_infinity
from .tape import Tape


def true_underline_mask(digits_by_position: list[int]) -> list[bool]:
    """A position is underlined iff some strictly higher position is nonzero
    (significant but not the leading significant digit)."""
    out = []
    seen_nonzero = False
    for d in reversed(digits_by_position):
        out.append(seen_nonzero)
        if d:
            seen_nonzero = True
    out.reverse()
    return out


def underline_violations(tape: Tape) -> list[str]:
    """Compare every track's underlines against a from-scratch recomputation."""
    if tape.ghosts is None:
        raise ValueError("underline check needs the ghost track")
    problems = []
    slot_of_position: dict[int, int] = {}
    for slot, g in enumerate(tape.ghosts):
        if g is not None:
            slot_of_position[g] = slot
    top = max(slot_of_position, default=-1)
    for track in range(tape.k):
        digits = [tape.digits[slot_of_position[p]][track] for p in range(top + 1)]
        want = true_underline_mask(digits)
        for p in range(top + 1):
            have = bool(tape.unders[slot_of_position[p]] >> track & 1)
            if have != want[p]:
                problems.append(
                    f"track {track + 1} position {p}: underline {have}, expected {want[p]}")
    return problems


def digit_bound_violations(tape: Tape) -> list[str]:
    bound = tape.radix - 1
    problems = []
    for slot, digs in enumerate(tape.digits):
        if digs is None:
            continue
        for t, d in enumerate(digs):
            if abs(d) > bound:
                problems.append(
                    f"track {t + 1} offset {slot - tape.origin}: digit {d} exceeds {bound}")
    return problems


def observation6_violations(tape: Tape) -> list[str]:
    """Unprimed adjacent pairs whose inner arrow points outward must hold
    consecutive position numbers."""
    if tape.ghosts is None:
        raise ValueError("observation-6 check needs the ghost track")
    problems = []
    head = tape.head
    for slot in range(len(tape.digits) - 1):
        a, b = slot, slot + 1
        if a >= head:  # pair right of the head: inner cell is a
            inner, outer, outward = a, b, 1
        elif b <= head:  # pair left of the head: inner cell is b
            inner, outer, outward = b, a, -1
        else:
            continue
        if inner == head or outer == head:
            continue
        if tape.arrows[inner] != outward:
            continue
        if tape.primes[inner] or tape.primes[outer]:
            continue
        gi, go = tape.ghosts[inner], tape.ghosts[outer]
        if gi is None or go is None:
            continue
        if go != gi + 1:
            problems.append(
                f"offsets {inner - tape.origin},{outer - tape.origin}: "
                f"positions {gi},{go} not consecutive")
    return problems


def position_zero_slot(tape: Tape) -> int:
    """The slot of position 0: adjacent to the head, on its arrow side."""
    return tape.head + tape.arrows[tape.head]


def ghost_head_adjacency_violations(tape: Tape) -> list[str]:
    if tape.ghosts is None:
        raise ValueError("head-adjacency check needs the ghost track")
    slot = position_zero_slot(tape)
    g = tape.ghosts[slot] if 0 <= slot < len(tape.ghosts) else None
    if g != 0:
        return [f"cell on the head's arrow side has position {g}, expected 0"]
    return []


def value_violations(machine: Machine, oracle: OracleCounter) -> list[str]:
    problems = []
    for t in range(machine.k):
        have = machine.tape.represented_value(t)
        want = oracle.values[t]
        if have != want:
            problems.append(f"track {t + 1}: represents {have}, oracle {want}")
        sign = machine.sign_bits[t]
        want_sign = (want > 0) - (want < 0)
        if sign != want_sign:
            problems.append(f"track {t + 1}: sign bit {sign}, oracle sign {want_sign}")
    return problems


def zero_detection_violations(machine: Machine, oracle: OracleCounter) -> list[str]:
    """Valid right after an injection: position-0 digit zero and not
    underlined iff the count is zero."""
    tape = machine.tape
    slot = position_zero_slot(tape)
    problems = []
    for t in range(machine.k):
        flag = tape.digits[slot][t] == 0 and not tape.unders[slot] >> t & 1
        if flag != (oracle.values[t] == 0):
            problems.append(
                f"track {t + 1}: zero flag {flag} but oracle value {oracle.values[t]}")
    return problems


class VerifiedRun:
    """Step a machine against every independent oracle at once.

    Feeds commands with the same admission policy as Machine.run_steps,
    replays consumed mutations into an OracleCounter, checks move
    equivalence against the schedule generator, sign answers, zero
    detection, digit bounds, and (sampled) the structural tape invariants.
    """

    def __init__(self, machine: Machine, source: Optional[Iterable[Command]] = None,
                 deep_every: int = 1):
        self.machine = machine
        self.oracle = OracleCounter(machine.k)
        self._pull: Optional[Iterator[Command]] = iter(source) if source is not None else None
        self._held: Optional[Command] = None
        self._exhausted = source is None
        self._submitted_mut: list[Optional[Command]] = [None] * machine.k
        self._schedule = iter_tour_infinity()
        self.deep_every = deep_every
        self.violations: list[str] = []
        self._corrupt_at = 0  # test hook: step at which to flip a digit

    def corrupt_at(self, step: int) -> "VerifiedRun":
        self._corrupt_at = step
        return self

    def _note(self, step: int, what: str, details: list[str]) -> None:
        for d in details:
            self.violations.append(f"step {step}: {what}: {d}")

    def _admit(self) -> None:
        m = self.machine
        while True:
            if self._held is None:
                self._held = next(self._pull, None)
                if self._held is None:
                    self._exhausted = True
                    return
            if not m.can_accept(self._held):
                return
            cmd = self._held
            m.submit(cmd)
            if cmd.kind is not CommandKind.SIGN:
                self._submitted_mut[cmd.counter - 1] = cmd
            self._held = None

    def step(self) -> None:
        m = self.machine
        if not self._exhausted:
            self._admit()
        outcome = m.step()
        step = m.step_count
        expected: Optional[Move] = next(self._schedule)
        if (outcome.rule.value != expected.kind.value
                or outcome.mirrored != (expected.direction > 0)):
            self._note(step, "move mismatch",
                       [f"engine {outcome.rule.name} mirrored={outcome.mirrored}, "
                        f"schedule {expected.kind.name} direction={expected.direction}"])
        if outcome.injected:
            for t in range(m.k):
                cmd = self._submitted_mut[t]
                if cmd is not None:
                    self.oracle.apply(cmd)
                    self._submitted_mut[t] = None
            if outcome.responses:
                for t, resp in enumerate(outcome.responses):
                    if resp is not None and resp != self.oracle.sign(t + 1):
                        self._note(step, "sign answer",
                                   [f"track {t + 1}: machine {resp}, "
                                    f"oracle {self.oracle.sign(t + 1)}"])
            if m.tape.ghosts is not None:
                self._note(step, "zero detection",
                           zero_detection_violations(m, self.oracle))
        if self._corrupt_at and step == self._corrupt_at:
            m.tape.digits[position_zero_slot(m.tape)][0] += 1  # induced fault
        if m.tape.ghosts is not None and step % self.deep_every == 0:
            self._note(step, "digit bound", digit_bound_violations(m.tape))
            self._note(step, "value", value_violations(m, self.oracle))
            self._note(step, "underlines", underline_violations(m.tape))
            self._note(step, "observation 6", observation6_violations(m.tape))
            self._note(step, "head adjacency", ghost_head_adjacency_violations(m.tape))

    def run(self, n_steps: int, stop_on_violation: bool = True) -> list[str]:
        for _ in range(n_steps):
            self.step()
            if stop_on_violation and self.violations:
                break
        return self.violations
