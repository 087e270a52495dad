"""Delay-1 wrapper: answer every command exactly one step after submission.

The raw machine handles a command within d = 3 steps (its injection
spacing); this wrapper closes the gap with the classic phase construction.
Time is cut into phases of 2kd steps. Each counter's count c is split as

    |c| = c0 + c1 * 2kd

with c0 and the signs of c and c1 held here in finite control and c1 held
in the corresponding track of the inner machine. Commands are absorbed
into c0 immediately and answered on the next step. At each phase boundary
the counter schedules at most one inner mutation: a carry (inner INC,
c0 -= 2kd) if c0 > 6kd held at the boundary, a borrow (inner DEC,
c0 += 2kd) if c0 < 4kd held and c1 was nonzero. One inner sign
interrogation per counter per phase refreshes the cached zeroness of c1.
A count is zero exactly when its c0 is zero and its c1 was zero when the
current phase began; the sign in finite control flips the moment the
count crosses zero (c0 therefore never goes negative here, a tightening
of the construction's [-2kd, 8kd] envelope).
"""

from __future__ import annotations

from typing import Iterable, Optional

from .commands import Command, CommandKind, SignResponse
from .engine import Machine


class PhaseInvariantError(AssertionError):
    """A phase-boundary invariant failed; the wrapper state is corrupt."""


class RealTimeMachine:
    """k counters with command-response delay exactly 1.

    ``d`` must be at least the inner machine's injection spacing bound (3);
    it is configurable only to exercise the wrapper against artificially
    slower inner machines in tests.
    """

    def __init__(self, k: int, radix: int = 4, d: int = 3, ghost: bool = False):
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        if d < 3:
            raise ValueError(f"delay budget d must be at least 3, got {d}")
        self.k = k
        self.d = d
        self.phase_length = 2 * k * d
        self.inner = Machine(k, radix, ghost=ghost)
        self.c0 = [0] * k
        self.sign_of_c = [0] * k  # -1 | 0 | +1
        self.c1_zero = [True] * k  # zeroness of inner count, per interrogation
        self.c1_zero_at_phase_start = [True] * k
        self.phase_pos = 0
        self.step_count = 0
        self.phases = 0
        self._awaiting_answer = [False] * k
        self._pending_response: Optional[SignResponse] = None
        # diagnostics only: shadow of the inner counts, never read for decisions
        self._c1_ledger = [0] * k

    # -- phase machinery ---------------------------------------------------

    def _phase_boundary(self) -> None:
        kd2 = self.phase_length
        inner = self.inner
        submit = inner.submit
        for t in range(self.k):
            if self._awaiting_answer[t]:
                raise PhaseInvariantError(
                    f"counter {t + 1}: interrogation unanswered at phase boundary")
            if inner._pending_mut[t] is not None or inner._pending_sign[t]:
                raise PhaseInvariantError(
                    f"counter {t + 1}: inner command not consumed within its phase")
            c0 = self.c0[t]
            if not 0 <= c0 <= 4 * kd2:
                raise PhaseInvariantError(f"counter {t + 1}: c0={c0} out of range")
            if not self.c1_zero[t] and c0 < kd2:
                raise PhaseInvariantError(
                    f"counter {t + 1}: c0={c0} below {kd2} while inner count nonzero")
            if self.c1_zero[t] != (self._c1_ledger[t] == 0):
                raise PhaseInvariantError(
                    f"counter {t + 1}: cached c1 zeroness disagrees with ledger")
            self.c1_zero_at_phase_start[t] = self.c1_zero[t]
            if c0 > 3 * kd2:  # 6kd
                submit(Command(t + 1, CommandKind.INC))
                self.c0[t] = c0 - kd2
                self._c1_ledger[t] += 1
                self.c1_zero[t] = False  # became >= 1
            elif c0 < 2 * kd2 and not self.c1_zero[t]:  # 4kd
                submit(Command(t + 1, CommandKind.DEC))
                self.c0[t] = c0 + kd2
                self._c1_ledger[t] -= 1
                # zeroness now unknown; the interrogation below refreshes it
            submit(Command(t + 1, CommandKind.SIGN))
            self._awaiting_answer[t] = True
        self.phases += 1

    def _absorb(self, command: Command) -> Optional[SignResponse]:
        t = command.counter - 1
        if not 0 <= t < self.k:
            raise ValueError(f"counter index {command.counter} out of range 1..{self.k}")
        kind = command.kind
        if kind is CommandKind.SIGN:
            return SignResponse(self.sign_of_c[t])
        if kind is CommandKind.NOP:
            return None
        delta = 1 if kind is CommandKind.INC else -1
        sgn = self.sign_of_c[t]
        if sgn == 0:
            self.sign_of_c[t] = delta
            self.c0[t] += 1
        elif sgn == delta:
            self.c0[t] += 1
        else:
            self.c0[t] -= 1
            if self.c0[t] == 0 and self.c1_zero_at_phase_start[t]:
                self.sign_of_c[t] = 0
            elif self.c0[t] < 0:
                raise PhaseInvariantError(f"counter {t + 1}: c0 went negative")
        return None

    # -- public stepping -----------------------------------------------------

    def step(self, command: Optional[Command] = None) -> Optional[SignResponse]:
        """Advance one step: emit the previous command's response, absorb
        the new command (if any), and run the inner machine one step."""
        if self.phase_pos == 0:
            self._phase_boundary()
        response = self._pending_response
        self._pending_response = None
        if command is not None:
            self._pending_response = self._absorb(command)
        _code, answers, _carries = self.inner._step_core()
        if answers is not None:
            for t, ans in enumerate(answers):
                if ans is not None:
                    self.c1_zero[t] = ans == 0
                    self._awaiting_answer[t] = False
        self.phase_pos += 1
        if self.phase_pos == self.phase_length:
            self.phase_pos = 0
        self.step_count += 1
        return response

    def run(self, commands: Iterable[Optional[Command]],
            flush: bool = False) -> list[Optional[SignResponse]]:
        """Step once per stream element; element i's response lands at
        index i+1. With flush=True a trailing idle step collects the final
        response."""
        responses = [self.step(command) for command in commands]
        if flush:
            responses.append(self.step(None))
        return responses

    def counts(self) -> list[int]:
        """Diagnostic reconstruction of the counts from wrapper state plus
        the inner-count ledger (test use; not available to finite control)."""
        return [
            s * (c0 + c1 * self.phase_length)
            for s, c0, c1 in zip(self.sign_of_c, self.c0, self._c1_ledger)
        ]
