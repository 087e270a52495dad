"""Tape storage: cells with signed digits, overarrows, underlines, and primes.

Cells are stored in parallel lists indexed by slot; ``origin`` is the slot
of offset 0 (the head's starting square). Unmaterialized squares are blank:
digit 0 on every track, no underline, no primes, arrow pointing away from
the head's starting side (Left below offset 0, Right above). The cell at
offset -1 initially carries a single prime (the endmarker), which makes a
separate start rule unnecessary.

Rendering grammar, one token per cell, space separated:

    token  := [_] ARROW base PRIMES          (single track)
            | ARROW ( part {| part} ) PRIMES (multiple tracks)
    part   := [_] digit
    ARROW  := < | >
    base   := digit | *
    PRIMES := "" | ' | ''

``_`` marks an underline, ``*`` the head. Negative digits print as e.g. -1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional


class Arrow(IntEnum):
    LEFT = -1
    RIGHT = 1


class GhostDisabledError(RuntimeError):
    """Raised when an operation needs the debug ghost track but it is off."""


class ParseError(ValueError):
    """Raised for text that does not conform to the rendering grammar."""


@dataclass(frozen=True)
class Cell:
    """Value snapshot of one square. ``digits`` is None for the head mark."""

    digits: Optional[tuple[int, ...]]
    arrow: Arrow
    underlines: tuple[bool, ...]
    primes: int

    @property
    def is_head(self) -> bool:
        return self.digits is None


_LEFT_PAD = 4
_RIGHT_PAD = 8


class Tape:
    """The doubly-extensible storage tape of a k-track machine.

    The parallel lists (digits/arrows/primes/unders/ghosts) are manipulated
    directly by the rewrite engine; everything else should go through the
    methods here. ``ghosts`` carries true position numbers for verification
    only and is None when disabled; rule selection never reads it.
    """

    __slots__ = ("k", "radix", "digits", "arrows", "primes", "unders",
                 "ghosts", "head", "origin")

    def __init__(self, k: int = 1, radix: int = 4, ghost: bool = False):
        if k < 1:
            raise ValueError(f"need at least one track, got k={k}")
        if radix < 4:
            raise ValueError(f"radix must be at least 4, got {radix}")
        self.k = k
        self.radix = radix
        n = _LEFT_PAD + 1 + _RIGHT_PAD
        self.digits: list = [[0] * k for _ in range(n)]
        self.digits[_LEFT_PAD] = None  # head mark
        self.arrows = [-1] * _LEFT_PAD + [1] * (1 + _RIGHT_PAD)
        self.primes = [0] * n
        self.primes[_LEFT_PAD - 1] = 1  # singly primed endmarker at offset -1
        self.unders = [0] * n  # per-track underline bitmasks
        self.head = _LEFT_PAD
        self.origin = _LEFT_PAD
        if ghost:
            self.ghosts: Optional[list] = [None] * (_LEFT_PAD + 1) + list(range(_RIGHT_PAD))
        else:
            self.ghosts = None

    # -- growth ----------------------------------------------------------

    def _grow_right(self, n: int) -> None:
        k = self.k
        base = len(self.digits) - self.origin - 1  # offset of last slot, minus 1 = ghost
        self.digits.extend([0] * k for _ in range(n))
        self.arrows.extend([1] * n)
        self.primes.extend([0] * n)
        self.unders.extend([0] * n)
        if self.ghosts is not None:
            self.ghosts.extend(range(base, base + n))

    def _grow_left(self, n: int) -> None:
        k = self.k
        self.digits[:0] = [[0] * k for _ in range(n)]
        self.arrows[:0] = [-1] * n
        self.primes[:0] = [0] * n
        self.unders[:0] = [0] * n
        if self.ghosts is not None:
            self.ghosts[:0] = [None] * n
        self.origin += n
        self.head += n

    # -- cell access -----------------------------------------------------

    @property
    def head_offset(self) -> int:
        return self.head - self.origin

    def _blank_cell(self, offset: int) -> Cell:
        arrow = Arrow.LEFT if offset < 0 else Arrow.RIGHT
        return Cell(tuple([0] * self.k), arrow, tuple([False] * self.k), 0)

    def cell_at(self, offset: int) -> Cell:
        """The cell at a signed offset; implicit blanks are materialized
        as values only, never written back."""
        slot = self.origin + offset
        if not 0 <= slot < len(self.digits):
            return self._blank_cell(offset)
        digs = self.digits[slot]
        mask = self.unders[slot]
        k = self.k
        return Cell(
            None if digs is None else tuple(digs),
            Arrow(self.arrows[slot]),
            tuple(bool(mask >> t & 1) for t in range(k)),
            self.primes[slot],
        )

    def cells(self, lo: int, hi: int) -> Iterator[Cell]:
        for offset in range(lo, hi + 1):
            yield self.cell_at(offset)

    def _slot_blank(self, slot: int) -> bool:
        digs = self.digits[slot]
        if digs is None:
            return False
        if self.primes[slot] or self.unders[slot]:
            return False
        if any(digs):
            return False
        expect = -1 if slot < self.origin else 1
        return self.arrows[slot] == expect

    def nonblank_extent(self) -> tuple[int, int]:
        """Smallest offset window containing the head and every nonblank cell."""
        lo = hi = self.head - self.origin
        for slot in range(len(self.digits)):
            if not self._slot_blank(slot):
                off = slot - self.origin
                lo = min(lo, off)
                hi = max(hi, off)
        return lo, hi

    # -- rendering -------------------------------------------------------

    def render(self, lo: int, hi: int) -> str:
        if lo > hi:
            raise ValueError(f"bad window {lo}..{hi}")
        return " ".join(render_cell(c) for c in self.cells(lo, hi))

    def render_extent(self, pad: int = 2) -> str:
        lo, hi = self.nonblank_extent()
        return self.render(lo - pad, hi + pad)

    # -- values ----------------------------------------------------------

    def represented_value(self, track: int = 0) -> int:
        """Sum of digit * radix**position over the ghost-numbered cells."""
        if self.ghosts is None:
            raise GhostDisabledError("represented_value needs the ghost track")
        r = self.radix
        total = 0
        for slot, g in enumerate(self.ghosts):
            if g is None:
                continue
            d = self.digits[slot][track]
            if d:
                total += d * r ** g
        return total

    def position_digits(self, track: int = 0) -> list[int]:
        """Digits in true position order, index 0 = least significant."""
        if self.ghosts is None:
            raise GhostDisabledError("position_digits needs the ghost track")
        out: dict[int, int] = {}
        for slot, g in enumerate(self.ghosts):
            if g is not None:
                out[g] = self.digits[slot][track]
        return [out.get(p, 0) for p in range(max(out, default=-1) + 1)]

    # -- copying / equality ----------------------------------------------

    def copy(self) -> "Tape":
        dup = Tape.__new__(Tape)
        dup.k = self.k
        dup.radix = self.radix
        dup.digits = [None if d is None else d[:] for d in self.digits]
        dup.arrows = self.arrows[:]
        dup.primes = self.primes[:]
        dup.unders = self.unders[:]
        dup.ghosts = None if self.ghosts is None else self.ghosts[:]
        dup.head = self.head
        dup.origin = self.origin
        return dup

    def __eq__(self, other) -> bool:
        """Structural equality of markings, aligned on the head square."""
        if not isinstance(other, Tape):
            return NotImplemented
        if self.k != other.k:
            return False
        a_lo, a_hi = self.nonblank_extent()
        b_lo, b_hi = other.nonblank_extent()
        ha, hb = self.head_offset, other.head_offset
        lo = min(a_lo - ha, b_lo - hb)
        hi = max(a_hi - ha, b_hi - hb)
        return all(self.cell_at(ha + d) == other.cell_at(hb + d) for d in range(lo, hi + 1))

    __hash__ = None  # type: ignore[assignment]


def render_cell(cell: Cell) -> str:
    arrow = "<" if cell.arrow < 0 else ">"
    if cell.digits is None:
        return arrow + "*"
    primes = "'" * cell.primes
    if len(cell.digits) == 1:
        under = "_" if cell.underlines[0] else ""
        return f"{under}{arrow}{cell.digits[0]}{primes}"
    parts = "|".join(
        ("_" if u else "") + str(d) for d, u in zip(cell.digits, cell.underlines)
    )
    return f"{arrow}({parts}){primes}"


_SINGLE_RE = re.compile(r"^(_?)([<>])(-?\d+|\*)('{0,2})$")
_MULTI_RE = re.compile(r"^([<>])\(([^)]*)\)('{0,2})$")
_PART_RE = re.compile(r"^(_?)(-?\d+)$")


def _parse_token(token: str, line_pos: int):
    """Return (digits|None, arrow, underlines, primes) for one cell token."""
    m = _SINGLE_RE.match(token)
    if m:
        under, arrow, base, primes = m.groups()
        arrow_v = -1 if arrow == "<" else 1
        if base == "*":
            if under or primes:
                raise ParseError(f"cell {line_pos}: head mark cannot carry marks: {token!r}")
            return None, arrow_v, (), 0
        return (int(base),), arrow_v, (under == "_",), len(primes)
    m = _MULTI_RE.match(token)
    if m:
        arrow, body, primes = m.groups()
        digits = []
        unders = []
        for part in body.split("|"):
            pm = _PART_RE.match(part)
            if not pm:
                raise ParseError(f"cell {line_pos}: bad track part {part!r} in {token!r}")
            unders.append(pm.group(1) == "_")
            digits.append(int(pm.group(2)))
        return tuple(digits), -1 if arrow == "<" else 1, tuple(unders), len(primes)
    raise ParseError(f"cell {line_pos}: malformed token {token!r}")


def parse_rendered(text: str, radix: int = 4) -> Tape:
    """Inverse of render: rebuild a tape from its rendered form.

    The head lands at offset 0; ghosts are disabled (position numbers are
    not recoverable from a rendering).
    """
    tokens = text.split()
    if not tokens:
        raise ParseError("empty rendering")
    parsed = [_parse_token(tok, i) for i, tok in enumerate(tokens)]
    head_positions = [i for i, p in enumerate(parsed) if p[0] is None]
    if len(head_positions) != 1:
        raise ParseError(f"expected exactly one head mark, found {len(head_positions)}")
    head_index = head_positions[0]
    k = next((len(p[0]) for p in parsed if p[0] is not None), 1)
    tape = Tape(k, radix)
    # clear the initial endmarker/head; rebuild the window verbatim
    tape.primes[tape.origin - 1] = 0
    tape.digits[tape.head] = [0] * k
    need_hi = len(tokens) - head_index + 2
    if tape.origin + need_hi >= len(tape.digits):
        tape._grow_right(tape.origin + need_hi - len(tape.digits) + 1)
    if head_index + 2 > tape.origin:
        tape._grow_left(head_index + 2 - tape.origin)
    for i, (digits, arrow, unders, primes) in enumerate(parsed):
        slot = tape.origin + (i - head_index)
        if digits is None:
            tape.digits[slot] = None
            tape.head = slot
        else:
            if len(digits) != k:
                raise ParseError(f"cell {i}: expected {k} tracks, got {len(digits)}")
            if any(abs(d) > radix - 1 for d in digits):
                raise ParseError(f"cell {i}: digit out of range for radix {radix}")
            tape.digits[slot] = list(digits)
            mask = 0
            for t, u in enumerate(unders):
                if u:
                    mask |= 1 << t
            tape.unders[slot] = mask
        tape.arrows[slot] = arrow
        tape.primes[slot] = primes
    return tape
