"""Schedule oracles: the recursive tour/pushback move generator, the binary
carry schedule, closed-form tour lengths, opportunity analysis, and an
explicit permutation simulator.

Nothing here ever looks at a tape; this module exists so the rewrite
engine can be checked against an independently generated prediction of
its motion. The mutual recursion it expands is

    tour(i+1,-)  = tour(i,-)   tour'(i,+)      tour(i,-)
    tour'(i+1,+) = tour''(i,+) pushback'(i+1)  tour'(i,+)  tour(i,-)
    tour''(i+1,+)= tour''(i,+) pushback''(i+1) tour'(i,+)  tour(i,-)

with the single atomic moves as base cases, and the infinite process is

    tour(inf,-) = tour(0,-) tour'(0,+) tour(0,-) tour'(1,+) tour(1,-) ...

The ``direction`` of a move is the side position 0 is on when the move
fires (+1 right, -1 left); negative and positive 0-tours flip it,
pushbacks leave it alone, and the process starts at +1. This matches the
engine's mirrored flag: a move with direction +1 fires as a mirror image.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

RIGHT = 1
LEFT = -1


class MoveKind(Enum):
    """Atomic permutation moves; values match the engine's rule numbers."""

    NEG_TOUR0 = 1
    POS_TOUR0_PRIMED = 2
    POS_TOUR0_DOUBLE_PRIMED = 3
    PUSHBACK_PRIMED = 4
    PUSHBACK_DOUBLE_PRIMED = 5


_POS_TOUR0 = (MoveKind.POS_TOUR0_PRIMED, MoveKind.POS_TOUR0_DOUBLE_PRIMED)
_PUSHBACKS = (MoveKind.PUSHBACK_PRIMED, MoveKind.PUSHBACK_DOUBLE_PRIMED)


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    level: int  # 0 for 0-tours; pushback recursion level >= 1
    direction: int  # +1 position 0 to the right, -1 to the left

    def opportunity_levels(self) -> tuple[int, ...]:
        """Which i-opportunities this move provides."""
        if self.kind in _POS_TOUR0:
            return (0, 1)
        if self.kind in _PUSHBACKS:
            return (self.level + 1,)
        return ()


class TourVariant(Enum):
    NEGATIVE = "negative"
    POSITIVE_PRIMED = "positive'"
    POSITIVE_DOUBLE_PRIMED = "positive''"


@dataclass(frozen=True)
class TourSpec:
    order: int
    variant: TourVariant

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("tour order must be nonnegative")


@dataclass
class MoveTrace:
    moves: list[Move]

    def opportunities(self) -> list[tuple[int, int]]:
        """(level, 1-based move index) pairs, in move order."""
        out = []
        for idx, mv in enumerate(self.moves, 1):
            for lvl in mv.opportunity_levels():
                out.append((lvl, idx))
        return out

    def __len__(self) -> int:
        return len(self.moves)


def binary_carry_schedule(n: int) -> list[int]:
    """First n carry-propagation distances of binary counting: element t
    (1-based) is the number of trailing zero bits of t."""
    if n < 1:
        raise ValueError("n must be positive")
    return [((t & -t).bit_length() - 1) for t in range(1, n + 1)]


# worklist tags
_NEG, _POS1, _POS2, _PB1, _PB2, _INF = range(6)

_VARIANT_TAG = {
    TourVariant.NEGATIVE: _NEG,
    TourVariant.POSITIVE_PRIMED: _POS1,
    TourVariant.POSITIVE_DOUBLE_PRIMED: _POS2,
}


def _expand(stack: list, direction: int) -> Iterator[Move]:
    """Expand a worklist of (tag, order) items into atomic moves, lazily.

    The stack is popped LIFO; an _INF item regenerates itself forever,
    yielding the tour(inf,-) suffix tour'(i,+) tour(i,-) for i = 0,1,...
    """
    p = direction
    append = stack.append
    pop = stack.pop
    while stack:
        tag, i = pop()
        if tag == _NEG:
            if i == 0:
                yield Move(MoveKind.NEG_TOUR0, 0, p)
                p = -p
            else:
                append((_NEG, i - 1))
                append((_POS1, i - 1))
                append((_NEG, i - 1))
        elif tag == _POS1:
            if i == 0:
                yield Move(MoveKind.POS_TOUR0_PRIMED, 0, p)
                p = -p
            else:
                append((_NEG, i - 1))
                append((_POS1, i - 1))
                append((_PB1, i))
                append((_POS2, i - 1))
        elif tag == _POS2:
            if i == 0:
                yield Move(MoveKind.POS_TOUR0_DOUBLE_PRIMED, 0, p)
                p = -p
            else:
                append((_NEG, i - 1))
                append((_POS1, i - 1))
                append((_PB2, i))
                append((_POS2, i - 1))
        elif tag == _PB1:
            yield Move(MoveKind.PUSHBACK_PRIMED, i, p)
        elif tag == _PB2:
            yield Move(MoveKind.PUSHBACK_DOUBLE_PRIMED, i, p)
        else:  # _INF
            append((_INF, i + 1))
            append((_NEG, i))
            append((_POS1, i))


def tour_moves(spec: TourSpec, direction: int = RIGHT) -> MoveTrace:
    """Fully expand one tour into its atomic moves."""
    return MoveTrace(list(_expand([(_VARIANT_TAG[spec.variant], spec.order)], direction)))


def iter_tour_infinity(direction: int = RIGHT) -> Iterator[Move]:
    """Stream the moves of tour(inf,-) forever, in constant memory per level."""
    return _expand([(_INF, 0), (_NEG, 0)], direction)


def tour_infinity(n: int) -> MoveTrace:
    """First n moves of tour(inf,-)."""
    if n < 1:
        raise ValueError("n must be positive")
    it = iter_tour_infinity()
    return MoveTrace([next(it) for _ in range(n)])


def tour_length(spec: TourSpec) -> int:
    """Closed form: (5*3^i -+ 2i - 1)/4 moves for negative/positive i-tours."""
    i = spec.order
    if spec.variant is TourVariant.NEGATIVE:
        return (5 * 3 ** i - 2 * i - 1) // 4
    return (5 * 3 ** i + 2 * i - 1) // 4


@dataclass
class SpacingReport:
    """Result of checking the opportunity-spacing guarantees on a trace."""

    moves_checked: int
    max_level: int
    violations: list[str] = field(default_factory=list)
    max_zero_gap: int = 0
    first_counts: dict[int, int] = field(default_factory=dict)
    max_between: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_opportunity_spacing(moves: Iterable[Move], max_level: int) -> SpacingReport:
    """Verify, over a move trace: 0-opportunities at most 3 moves apart,
    every 0-opportunity is also a 1-opportunity, exactly two (i+1)-
    opportunities before the first (i+2)-opportunity and at most four
    between consecutive ones, for i+2 <= max_level."""
    report = SpacingReport(0, max_level)
    last_zero = 0
    counts = [0] * (max_level + 1)  # pending (L)-opportunities since last (L+1)
    seen = [False] * (max_level + 1)
    idx = 0
    for idx, mv in enumerate(moves, 1):
        levels = mv.opportunity_levels()
        if not levels:
            continue
        if levels[0] == 0:
            gap = idx - last_zero
            if gap > 3:
                report.violations.append(f"0-opportunity gap {gap} ending at move {idx}")
            if gap > report.max_zero_gap:
                report.max_zero_gap = gap
            last_zero = idx
            if 1 not in levels:
                report.violations.append(f"0-opportunity without 1-opportunity at move {idx}")
        for lvl in levels:
            if 1 <= lvl < max_level:
                counts[lvl] += 1
            if 2 <= lvl <= max_level:
                pending = counts[lvl - 1]
                if not seen[lvl]:
                    seen[lvl] = True
                    report.first_counts[lvl] = pending
                    if pending != 2:
                        report.violations.append(
                            f"{pending} level-{lvl - 1} opportunities before first "
                            f"level-{lvl} opportunity at move {idx} (expected 2)")
                else:
                    if pending > report.max_between.get(lvl, 0):
                        report.max_between[lvl] = pending
                    if pending > 4:
                        report.violations.append(
                            f"{pending} level-{lvl - 1} opportunities between "
                            f"level-{lvl} opportunities ending at move {idx} (max 4)")
                counts[lvl - 1] = 0
    report.moves_checked = idx
    if idx - last_zero > 3:
        report.violations.append(
            f"0-opportunity gap exceeds 3 in the trailing {idx - last_zero} moves")
    return report


class PermutationSim:
    """Explicit position-number permutation driven by atomic moves.

    Slot j initially holds position j-1 (slot 0 holds the head); untouched
    slots keep that value, so the sequence extends lazily on demand. The
    simulator asserts the structural preconditions of every move it
    applies, making it self-checking.
    """

    HEAD = None

    def __init__(self):
        self.cells: list[Optional[int]] = [None, 0, 1, 2]
        self.head = 0
        self._p = RIGHT
        self.moves_applied = 0

    def _ensure(self, index: int) -> None:
        while len(self.cells) <= index:
            self.cells.append(len(self.cells) - 1)

    def apply(self, move: Move) -> None:
        if move.direction != self._p:
            raise AssertionError(
                f"move {move} fires at direction {self._p} in the process")
        p = self._p
        cells = self.cells
        h = self.head
        kind = move.kind
        if kind is MoveKind.NEG_TOUR0:
            o = h + p
            assert o >= 0, "head fell off the initial square"
            self._ensure(o)
            assert cells[o] == 0, "negative 0-tour must cross position 0"
            cells[h], cells[o] = cells[o], cells[h]
            self.head = o
            self._p = -p
        elif kind in _POS_TOUR0:
            assert h >= 1, "positive 0-tour needs cells on both sides"
            self._ensure(h + 1)
            lo, hi = h - 1, h + 1
            assert cells[h + p] == 0, "positive 0-tour must move position 0"
            cells[lo], cells[hi] = cells[hi], cells[lo]
            self._p = -p
        else:
            a, b = h - p, h - 2 * p
            assert a >= 0 and b >= 0, "pushback fell off the initial square"
            self._ensure(max(a, b))
            assert cells[h + p] == 0, "pushback fires beside position 0"
            cells[a], cells[b] = cells[b], cells[a]
        self.moves_applied += 1

    def apply_all(self, moves: Iterable[Move]) -> None:
        for move in moves:
            self.apply(move)

    def snapshot(self, n_cells: Optional[int] = None) -> list[Optional[int]]:
        if n_cells is None:
            return list(self.cells)
        self._ensure(n_cells - 1)
        return self.cells[:n_cells]


def simulate_permutation(n: int, n_cells: Optional[int] = None) -> list[Optional[int]]:
    """Position layout (head marked None) after the first n moves of tour(inf,-)."""
    sim = PermutationSim()
    it = iter_tour_infinity()
    for _ in range(n):
        sim.apply(next(it))
    return sim.snapshot(n_cells)


def render_permutation(cells: Iterable[Optional[int]]) -> str:
    return " ".join("*" if c is None else str(c) for c in cells)
