"""Frozen golden fixtures for the worked all-increment example.

These strings were generated once by the engine and checked by eye against
the published displays; any future mismatch is a regression in the engine,
never a reason to edit the fixtures.
"""

INITIAL_RENDER = "<0 <0 <0' >* >0 >0"
INITIAL_WINDOW = (-3, 2)

#: Rule number and mirrored flag of the first six all-increment transitions.
SIX_STEP_RULES = [(1, True), (2, False), (1, True), (3, False), (4, True), (2, True)]

SIX_STEP_WINDOW = (-2, 5)
SIX_STEP_RENDERS = [
    "<0 <0 >0 <* >0 >0 >0 >0",
    "<0 <0 >0' >* <1 >0 >0 >0",
    "<0 <0 >0 <1 <* >0 >0 >0",
    "<0 <0 >0 >0'' >* <2 >0 >0",
    "<0 <0 >0' <0 >* <2 >0 >0",
    "<0 <0 >0' _>-1 <* <1' >0 >0",
]

BIG_RUN_STEPS = 2_980_000
BIG_RUN_COMMANDS = 1_191_993

#: Configuration after the big run, rendered over the nonblank extent
#: padded by two blank cells on each side.
BIG_RUN_RENDER = (
    "<0 <0 >0' >0' _>0 >1'' _>0' _>2 _>-1'' >* "
    "_<1 _>1' _<0 _<2'' _>-1 _<1 <0' <0' >0 >0"
)

#: The same count as a radix-4 signed-digit string, most significant first.
BIG_RUN_DIGITS_MSB = [1, 0, 2, 1, -1, 0, 0, 1, -1, 2, 1]
