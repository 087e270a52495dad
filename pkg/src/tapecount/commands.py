"""Counter command vocabulary and a big-integer reference counter.

The reference counter (`OracleCounter`) is the ground truth that every
simulation in this package is differentially tested against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterator, Optional


class CommandKind(Enum):
    INC = "inc"
    DEC = "dec"
    SIGN = "sign"
    NOP = "nop"


class SignResponse(IntEnum):
    """Three-valued answer to a sign inquiry."""

    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


@dataclass(frozen=True)
class Command:
    counter: int  # 1-based counter index
    kind: CommandKind

    def __str__(self) -> str:
        return f"{self.kind.value} {self.counter}"


#: Command kinds that occupy a machine's per-track mutation slot.
MUTATION_KINDS = (CommandKind.INC, CommandKind.DEC, CommandKind.NOP)

_DELTAS = {CommandKind.INC: 1, CommandKind.DEC: -1, CommandKind.NOP: 0}


def mutation_delta(kind: CommandKind) -> int:
    """+1 for INC, -1 for DEC, 0 for NOP."""
    return _DELTAS[kind]


def sign_of(value: int) -> SignResponse:
    if value > 0:
        return SignResponse.POSITIVE
    if value < 0:
        return SignResponse.NEGATIVE
    return SignResponse.ZERO


class OracleCounter:
    """k independent arbitrary-precision counters, by direct definition.

    Sign queries never mutate state; values never overflow (Python ints).
    """

    def __init__(self, k: int):
        if k < 1:
            raise ValueError(f"need at least one counter, got k={k}")
        self.values = [0] * k

    @property
    def k(self) -> int:
        return len(self.values)

    def _index(self, counter: int) -> int:
        if not 1 <= counter <= len(self.values):
            raise ValueError(f"counter index {counter} out of range 1..{len(self.values)}")
        return counter - 1

    def apply(self, command: Command) -> Optional[SignResponse]:
        i = self._index(command.counter)
        kind = command.kind
        if kind is CommandKind.SIGN:
            return sign_of(self.values[i])
        self.values[i] += _DELTAS[kind]
        return None

    def sign(self, counter: int) -> SignResponse:
        return sign_of(self.values[self._index(counter)])

    def copy(self) -> "OracleCounter":
        dup = OracleCounter(len(self.values))
        dup.values[:] = self.values
        return dup


class CommandSyntaxError(ValueError):
    """Raised for malformed command text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_KINDS_BY_NAME = {kind.value: kind for kind in CommandKind}


def parse_command_text(text: str, k: Optional[int] = None) -> list[Command]:
    """Parse the line-oriented command format: ``inc 1``, ``sign 2``, ...

    ``#`` starts a comment line; blank lines are ignored. When ``k`` is
    given, counter indices are range-checked against it.
    """
    commands = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CommandSyntaxError(line_no, f"expected 'KEYWORD INDEX', got {raw!r}")
        keyword, index_text = parts
        kind = _KINDS_BY_NAME.get(keyword)
        if kind is None:
            raise CommandSyntaxError(line_no, f"unknown command keyword {keyword!r}")
        try:
            counter = int(index_text)
        except ValueError:
            raise CommandSyntaxError(line_no, f"bad counter index {index_text!r}") from None
        if counter < 1 or (k is not None and counter > k):
            raise CommandSyntaxError(line_no, f"counter index {counter} out of range")
        commands.append(Command(counter, kind))
    return commands


def format_commands(commands) -> str:
    return "\n".join(str(c) for c in commands)


def all_inc(counter: int = 1) -> Iterator[Command]:
    """The worked example's command stream: increment forever."""
    cmd = Command(counter, CommandKind.INC)
    while True:
        yield cmd


_RANDOM_KINDS = (CommandKind.INC, CommandKind.DEC, CommandKind.SIGN, CommandKind.NOP)


def random_commands(rng: random.Random, k: int) -> Iterator[Command]:
    """Infinite uniform stream over all 4k commands. Deterministic per rng
    seed: one randrange draw per command against an interned command table."""
    table = [Command(counter, kind)
             for counter in range(1, k + 1) for kind in _RANDOM_KINDS]
    n = len(table)
    randrange = rng.randrange
    while True:
        yield table[randrange(n)]
