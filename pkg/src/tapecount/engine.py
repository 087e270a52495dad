"""Deterministic five-rule rewrite engine over the signed-digit tape.

Rule selection reads only the primes on the cell across from the head and
one nearby arrow (never the ghost track):

    R1  single-prime message        negative 0-tour, no propagation
    R2  no message, near arrow in   singly primed positive 0-tour;
                                    inject into position 0, then carry 0->1
    R3  no message, near arrow out  doubly primed positive 0-tour; same
                                    injection, carry target one cell further
    R4  double-prime, far arrow in  singly primed pushback; carry i+1 -> i+2
    R5  double-prime, far arrow out doubly primed pushback; carry i+1 -> i+2

The rules as written place position 0 to the left of the head (head arrow
Left); when the head arrow points Right the mirror images apply, handled
here by reflecting offsets through the sign ``s`` of the head arrow.

A carry fires when a digit exceeds radix/2 (borrow when below -radix/2):
the digit moves by -radix (+radix) and its successor by +1 (-1). Underlines
track significance: if the successor digit just became 0 and was not
underlined, the lower cell loses its underline; if it just left 0 and the
lower cell was not underlined, the lower cell gains one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Optional

from .commands import Command, CommandKind, SignResponse, mutation_delta
from .tape import Tape


class Rule(IntEnum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4
    R5 = 5


#: Rules that inject (positive 0-tours, the designated 0-opportunities).
INJECTING_RULES = (Rule.R2, Rule.R3)


class NoRuleMatches(Exception):
    """The configuration is corrupt; no rewrite rule applies."""


class QueueFull(Exception):
    """The addressed track's mutation slot already holds a command."""


@dataclass(frozen=True)
class EngineConfig:
    k: int = 1
    radix: int = 4
    ghost_enabled: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.radix < 4:
            raise ValueError(f"radix must be at least 4, got {self.radix}")


@dataclass(frozen=True)
class StepOutcome:
    rule: Rule
    mirrored: bool
    injected: bool
    head_offset: int
    responses: Optional[tuple[Optional[SignResponse], ...]] = None
    carries: Optional[tuple[tuple[int, int], ...]] = None  # (track, +1 carry | -1 borrow)


class Machine:
    """One k-track machine: tape, per-track sign bits, and pending commands.

    Stepping is strictly single-threaded; instances are independent values
    (``copy`` gives a fully detached machine).
    """

    def __init__(self, k: int = 1, radix: int = 4, ghost: bool = False):
        self.tape = Tape(k, radix, ghost=ghost)
        self.radix = radix
        self.sign_bits = [0] * k  # -1 | 0 | +1, one per track
        self._pending_mut: list[Optional[int]] = [None] * k
        self._pending_sign = [False] * k
        self._pending = 0
        self.step_count = 0
        self.injections = 0
        self.consumed = 0
        self._last_injection = 0
        self.max_injection_gap = 0
        self.max_abs_digit = 0
        self.max_position = 0
        # (step, position) pairs recorded whenever max_position grows
        self.position_growth: list[tuple[int, int]] = []

    @classmethod
    def from_config(cls, config: EngineConfig) -> "Machine":
        return cls(config.k, config.radix, ghost=config.ghost_enabled)

    @property
    def k(self) -> int:
        return self.tape.k

    @property
    def head_offset(self) -> int:
        return self.tape.head - self.tape.origin

    def sign(self, counter: int) -> SignResponse:
        return SignResponse(self.sign_bits[counter - 1])

    def copy(self) -> "Machine":
        dup = Machine.__new__(Machine)
        dup.__dict__.update(self.__dict__)
        dup.tape = self.tape.copy()
        dup.sign_bits = self.sign_bits[:]
        dup._pending_mut = self._pending_mut[:]
        dup._pending_sign = self._pending_sign[:]
        dup.position_growth = self.position_growth[:]
        return dup

    # -- command admission -------------------------------------------------

    def can_accept(self, command: Command) -> bool:
        t = command.counter - 1
        if command.kind is CommandKind.SIGN:
            return not self._pending_sign[t]
        return self._pending_mut[t] is None

    def submit(self, command: Command) -> None:
        """Queue one command. Sign queries are always accepted; a second
        mutation for a track whose slot is occupied raises QueueFull."""
        t = command.counter - 1
        if not 0 <= t < self.tape.k:
            raise ValueError(f"counter index {command.counter} out of range 1..{self.tape.k}")
        if command.kind is CommandKind.SIGN:
            if not self._pending_sign[t]:
                self._pending_sign[t] = True
                self._pending += 1
            return
        if self._pending_mut[t] is not None:
            raise QueueFull(f"track {command.counter} already holds a pending mutation")
        self._pending_mut[t] = mutation_delta(command.kind)
        self._pending += 1

    # -- rule selection ------------------------------------------------------

    def match_rule(self) -> tuple[Rule, bool]:
        """Which rule fires next, and whether as the mirror image.

        Reads only arrows and primes near the head (no ghost access).
        """
        tape = self.tape
        h = tape.head
        if h + 3 >= len(tape.primes):
            tape._grow_right(h + 4 - len(tape.primes))
        if h - 3 < 0:
            tape._grow_left(4)
            h = tape.head
        if tape.primes[h] or tape.unders[h]:
            raise NoRuleMatches("head cell carries marks")
        arrows = tape.arrows
        s = arrows[h]
        pc = tape.primes[h - s]
        if pc == 1:
            rule = Rule.R1
        elif pc == 0:
            rule = Rule.R2 if arrows[h + s] == -s else Rule.R3
        elif pc == 2:
            rule = Rule.R4 if arrows[h - 2 * s] == s else Rule.R5
        else:
            raise NoRuleMatches(f"message cell carries {pc} primes")
        return rule, s > 0

    # -- stepping ------------------------------------------------------------

    def _inject(self, bslot: int):
        """Consume pending mutations into position 0, refresh sign bits,
        answer pending sign queries. Returns per-track responses or None."""
        tape = self.tape
        digs = tape.digits[bslot]
        umask = tape.unders[bslot]
        signs = self.sign_bits
        muts = self._pending_mut
        queries = self._pending_sign
        responses = None
        for t in range(tape.k):
            m = muts[t]
            if m is not None:
                muts[t] = None
                self._pending -= 1
                self.consumed += 1
                if m:
                    d = digs[t] + m
                    digs[t] = d
                    if d > self.max_abs_digit or -d > self.max_abs_digit:
                        self.max_abs_digit = abs(d)
            else:
                m = 0
            if digs[t] == 0 and not umask >> t & 1:
                signs[t] = 0
            elif m and signs[t] == 0:
                signs[t] = 1 if m > 0 else -1
            if queries[t]:
                queries[t] = False
                self._pending -= 1
                if responses is None:
                    responses = [None] * tape.k
                responses[t] = signs[t]
        return responses

    def _propagate(self, f: int, g: int):
        """Carry/borrow from the cell at slot f (position i) into slot g
        (position i+1), with underline maintenance. Returns events or None."""
        tape = self.tape
        df = tape.digits[f]
        dg = tape.digits[g]
        r = self.radix
        events = None
        for t in range(tape.k):
            dv = df[t]
            if 2 * dv > r:
                df[t] = dv - r
                old = dg[t]
                new = old + 1
                delta = 1
            elif 2 * dv < -r:
                df[t] = dv + r
                old = dg[t]
                new = old - 1
                delta = -1
            else:
                continue
            dg[t] = new
            bit = 1 << t
            if new == 0:
                if not tape.unders[g] & bit:
                    tape.unders[f] &= ~bit
            elif old == 0:
                if not tape.unders[f] & bit:
                    tape.unders[f] |= bit
            if new > self.max_abs_digit or -new > self.max_abs_digit:
                self.max_abs_digit = abs(new)
            if events is None:
                events = []
            events.append((t, delta))
        return events

    def _step_core(self):
        """One transition. Returns (code, responses, carries) where code is
        rule | 8*mirrored; responses/carries are None unless present."""
        tape = self.tape
        arrows = tape.arrows
        primes = tape.primes
        digits = tape.digits
        unders = tape.unders
        ghosts = tape.ghosts
        h = tape.head
        if h + 3 >= len(primes):
            tape._grow_right(h + 4 - len(primes))
        elif h - 3 < 0:
            tape._grow_left(4)
            h = tape.head
        s = arrows[h]
        if primes[h] or unders[h]:
            raise NoRuleMatches("head cell carries marks")
        c = h - s
        pc = primes[c]
        responses = None
        carries = None
        if pc == 1:
            rule = 1
            primes[c] = 0
            b = h + s
            digits[h] = digits[b]
            arrows[h] = arrows[b]
            primes[h] = primes[b]
            unders[h] = unders[b]
            digits[b] = None
            arrows[b] = -s
            primes[b] = 0
            unders[b] = 0
            if ghosts is not None:
                ghosts[h] = ghosts[b]
                ghosts[b] = None
                ga, gb = ghosts[h], ghosts[c]
            tape.head = b
        elif pc == 0:
            b = h + s
            if arrows[b] == -s:
                rule = 2
                target = c
            else:
                rule = 3
                target = h + 2 * s
            if self._pending:
                responses = self._inject(b)
            self.injections += 1
            step = self.step_count + 1
            if step - self._last_injection > self.max_injection_gap:
                self.max_injection_gap = step - self._last_injection
            self._last_injection = step
            carries = self._propagate(b, target)
            digits[b], digits[c] = digits[c], digits[b]
            arrows[b], arrows[c] = arrows[c], arrows[b]
            primes[b], primes[c] = primes[c], primes[b]
            unders[b], unders[c] = unders[c], unders[b]
            primes[b] += rule - 1  # transported cell gains ' (R2) or '' (R3)
            arrows[c] = s
            arrows[h] = -s
            if ghosts is not None:
                ghosts[b], ghosts[c] = ghosts[c], ghosts[b]
                ga, gb = ghosts[b], ghosts[c]
        elif pc == 2:
            d = h - 2 * s
            if arrows[d] == s:
                rule = 4
                target = c
            else:
                rule = 5
                target = h - 3 * s
            carries = self._propagate(d, target)
            digits[c], digits[d] = digits[d], digits[c]
            arrows[c], arrows[d] = arrows[d], arrows[c]
            primes[c], primes[d] = primes[d], primes[c]
            unders[c], unders[d] = unders[d], unders[c]
            if rule == 4:
                primes[d] -= 1  # message weakens: pushback' re-primes singly
            arrows[c] = -s
            if ghosts is not None:
                ghosts[c], ghosts[d] = ghosts[d], ghosts[c]
                ga, gb = ghosts[d], ghosts[target]
        else:
            raise NoRuleMatches(f"message cell carries {pc} primes")
        self.step_count += 1
        if ghosts is not None:
            gm = ga if (gb is None or (ga is not None and ga > gb)) else gb
            if gm is not None and gm > self.max_position:
                self.max_position = gm
                self.position_growth.append((self.step_count, gm))
        return (rule + 8 if s > 0 else rule), responses, carries

    def step(self) -> StepOutcome:
        code, responses, carries = self._step_core()
        rule = Rule(code & 7)
        return StepOutcome(
            rule=rule,
            mirrored=code > 8,
            injected=code & 7 in (2, 3),
            head_offset=self.tape.head - self.tape.origin,
            responses=None if responses is None else tuple(
                None if r is None else SignResponse(r) for r in responses),
            carries=None if carries is None else tuple(carries),
        )

    # -- driving loops ---------------------------------------------------------

    def _admit(self, pull, held):
        """Head-of-line admission: queue stream commands while slots allow."""
        while True:
            if held is None:
                held = next(pull, None)
                if held is None:
                    return None, True
            t = held.counter - 1
            if held.kind is CommandKind.SIGN:
                if self._pending_sign[t]:
                    return held, False
                self._pending_sign[t] = True
                self._pending += 1
            else:
                if self._pending_mut[t] is not None:
                    return held, False
                self._pending_mut[t] = mutation_delta(held.kind)
                self._pending += 1
            held = None

    def run_steps(self, n: int, source: Optional[Iterable[Command]] = None,
                  rules_out=None, heads_out=None, carries_out=None) -> None:
        """Advance n steps, pulling commands from source as slots free up.

        rules_out collects rule|8*mirrored codes, heads_out head offsets,
        carries_out is a (steps, tracks, deltas) triple of array-likes.
        Responses are dropped; use step() or run_trace when they matter.
        """
        core = self._step_core
        pull = iter(source) if source is not None else None
        held = None
        exhausted = source is None
        rules_app = rules_out.append if rules_out is not None else None
        heads_app = heads_out.append if heads_out is not None else None
        if carries_out is not None:
            cs_app = carries_out[0].append
            ct_app = carries_out[1].append
            cd_app = carries_out[2].append
        tape = self.tape
        for _ in range(n):
            if not exhausted:
                held, done = self._admit(pull, held)
                if done:
                    exhausted = True
            code, _responses, carries = core()
            if rules_app is not None:
                rules_app(code)
            if heads_app is not None:
                heads_app(tape.head - tape.origin)
            if carries is not None and carries_out is not None:
                step = self.step_count
                for t, delta in carries:
                    cs_app(step)
                    ct_app(t)
                    cd_app(delta)

    def run_trace(self, n: int, source: Optional[Iterable[Command]] = None) -> list[StepOutcome]:
        """Advance n steps keeping full per-step outcomes (small runs)."""
        pull = iter(source) if source is not None else None
        held = None
        exhausted = source is None
        outcomes = []
        for _ in range(n):
            if not exhausted:
                held, done = self._admit(pull, held)
                if done:
                    exhausted = True
            outcomes.append(self.step())
        return outcomes

    def run_drain(self, source: Iterable[Command], max_steps: int = 10 ** 9,
                  rules_out=None, heads_out=None, carries_out=None) -> None:
        """Step until the (finite) source is exhausted and every queued
        command has been consumed, up to max_steps."""
        core = self._step_core
        pull = iter(source)
        held = None
        exhausted = False
        rules_app = rules_out.append if rules_out is not None else None
        heads_app = heads_out.append if heads_out is not None else None
        if carries_out is not None:
            cs_app = carries_out[0].append
            ct_app = carries_out[1].append
            cd_app = carries_out[2].append
        tape = self.tape
        for _ in range(max_steps):
            if not exhausted:
                held, done = self._admit(pull, held)
                if done:
                    exhausted = True
            if exhausted and not self._pending:
                return
            code, _responses, carries = core()
            if rules_app is not None:
                rules_app(code)
            if heads_app is not None:
                heads_app(tape.head - tape.origin)
            if carries is not None and carries_out is not None:
                step = self.step_count
                for t, delta in carries:
                    cs_app(step)
                    ct_app(t)
                    cd_app(delta)
        raise RuntimeError(f"source not drained within {max_steps} steps")


def rule_of_code(code: int) -> tuple[Rule, bool]:
    """Unpack a run_steps rule code into (rule, mirrored)."""
    return Rule(code & 7), code > 8


def propagate(from_cell, to_cell, track: int, radix: int = 4):
    """Carry/borrow between the cells at adjacent positions i and i+1.

    Pure cell-value counterpart of the engine's in-place propagation:
    returns (new_from, new_to, event) where event is +1 for a carry, -1
    for a borrow, None when the from digit is bounded by radix/2. The
    same underline maintenance applies: a to-digit reaching 0 with the
    to cell not underlined removes the from cell's underline; a to-digit
    leaving 0 with the from cell not underlined adds one there.
    """
    from .tape import Cell

    d = from_cell.digits[track]
    if 2 * d > radix:
        event = 1
    elif 2 * d < -radix:
        event = -1
    else:
        return from_cell, to_cell, None
    new_from = list(from_cell.digits)
    new_to = list(to_cell.digits)
    new_from[track] = d - event * radix
    old = new_to[track]
    new = old + event
    new_to[track] = new
    from_unders = list(from_cell.underlines)
    if new == 0:
        if not to_cell.underlines[track]:
            from_unders[track] = False
    elif old == 0:
        if not from_unders[track]:
            from_unders[track] = True
    return (
        Cell(tuple(new_from), from_cell.arrow, tuple(from_unders), from_cell.primes),
        Cell(tuple(new_to), to_cell.arrow, to_cell.underlines, to_cell.primes),
        event,
    )
