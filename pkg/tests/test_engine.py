import random
from array import array
from itertools import islice

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tapecount.checks import (VerifiedRun, observation6_violations,
                              true_underline_mask, underline_violations)
from tapecount.commands import (Command, CommandKind, OracleCounter, SignResponse,
                                all_inc, random_commands)
from tapecount.engine import (EngineConfig, Machine, NoRuleMatches, QueueFull,
                              Rule, propagate, rule_of_code)
from tapecount.tape import Arrow, Cell

INC1 = Command(1, CommandKind.INC)
DEC1 = Command(1, CommandKind.DEC)
SIGN1 = Command(1, CommandKind.SIGN)


def test_engine_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(k=0)
    with pytest.raises(ValueError):
        EngineConfig(radix=3)
    m = Machine.from_config(EngineConfig(k=2, radix=8, ghost_enabled=True))
    assert m.k == 2 and m.radix == 8 and m.tape.ghosts is not None


def test_six_step_rules_and_mirroring():
    m = Machine(1, 4)
    source = all_inc()
    expected = [(Rule.R1, True), (Rule.R2, False), (Rule.R1, True),
                (Rule.R3, False), (Rule.R4, True), (Rule.R2, True)]
    held = None
    for want in expected:
        assert m.match_rule() == want
        held, _ = m._admit(source, held)
        out = m.step()
        assert (out.rule, out.mirrored) == want


def test_fresh_tape_matches_rule1_mirrored():
    assert Machine(1, 4).match_rule() == (Rule.R1, True)


def test_step6_carry_and_underline():
    m = Machine(1, 4, ghost=True)
    outcomes = m.run_trace(6, source=all_inc())
    assert outcomes[-1].carries == ((0, 1),)
    tape = m.tape
    pos0 = tape.cell_at(tape.head - tape.origin + tape.arrows[tape.head])
    assert pos0.digits == (-1,) and pos0.underlines == (True,)
    transported = tape.cell_at(3)
    assert transported.digits == (1,) and transported.primes == 1
    assert m.sign_bits == [1]


def test_injection_flag_only_on_r2_r3():
    m = Machine(1, 4)
    for out in m.run_trace(500, source=all_inc()):
        assert out.injected == (out.rule in (Rule.R2, Rule.R3))


def test_nop_stream_stays_zero():
    m = Machine(1, 4, ghost=True)
    m.run_steps(10)
    assert m.tape.represented_value(0) == 0
    lo, hi = m.tape.nonblank_extent()
    for off in range(lo, hi + 1):
        cell = m.tape.cell_at(off)
        assert not any(cell.underlines)
        if cell.digits is not None:
            assert cell.digits == (0,)


def test_obliviousness_empty_vs_all_inc():
    rules_a, heads_a = array("b"), array("l")
    rules_b, heads_b = array("b"), array("l")
    Machine(1, 4).run_steps(1000, rules_out=rules_a, heads_out=heads_a)
    Machine(1, 4).run_steps(1000, source=all_inc(), rules_out=rules_b, heads_out=heads_b)
    assert rules_a == rules_b
    assert heads_a == heads_b


# -- propagation ------------------------------------------------------------


def make_cell(digit, underlined=False, arrow=Arrow.RIGHT, primes=0):
    return Cell((digit,), arrow, (underlined,), primes)


def test_propagate_carry_adds_underline():
    frm, to, event = propagate(make_cell(3), make_cell(0), 0)
    assert event == 1
    assert frm.digits == (-1,) and frm.underlines == (True,)
    assert to.digits == (1,)


def test_propagate_within_bound_does_nothing():
    for to_digit in (-3, 0, 2):
        frm, to, event = propagate(make_cell(2), make_cell(to_digit), 0)
        assert event is None
        assert frm == make_cell(2) and to == make_cell(to_digit)


def test_propagate_borrow_keeps_underlines_when_target_underlined():
    frm, to, event = propagate(make_cell(-3), make_cell(1, underlined=True), 0)
    assert event == -1
    assert frm.digits == (1,) and frm.underlines == (False,)
    assert to.digits == (0,) and to.underlines == (True,)


def test_propagate_removes_underline_when_target_reaches_zero():
    frm, to, event = propagate(make_cell(3, underlined=True), make_cell(-1), 0)
    assert event == 1
    assert to.digits == (0,)
    assert frm.underlines == (False,)


digit_strings = st.lists(st.integers(-3, 3), min_size=2, max_size=6)


@given(digit_strings, st.data())
def test_propagate_preserves_significance(digits, data):
    """Dual-route check: apply the local rule at one site of a correctly
    underlined string, then recompute underlines from scratch."""
    site = data.draw(st.integers(0, len(digits) - 2))
    unders = true_underline_mask(digits)
    frm = make_cell(digits[site], unders[site])
    to = make_cell(digits[site + 1], unders[site + 1])
    new_frm, new_to, event = propagate(frm, to, 0)
    new_digits = list(digits)
    new_digits[site] = new_frm.digits[0]
    new_digits[site + 1] = new_to.digits[0]
    want = true_underline_mask(new_digits)
    got = list(unders)
    got[site] = new_frm.underlines[0]
    got[site + 1] = new_to.underlines[0]
    assert got == want
    if event:
        assert abs(digits[site]) > 2
        assert new_digits[site] == digits[site] - event * 4


@given(st.integers(-3, 3), st.integers(-3, 3), st.booleans(), st.booleans(),
       st.sampled_from([4, 8, 10]))
def test_propagate_cells_agrees_with_engine_slots(df, dg, uf, ug, radix):
    """The pure-cell function and the engine's in-place loop must be the
    same transformation."""
    m = Machine(1, radix)
    f, g = m.tape.origin + 1, m.tape.origin + 2
    m.tape.digits[f] = [df]
    m.tape.digits[g] = [dg]
    m.tape.unders[f] = int(uf)
    m.tape.unders[g] = int(ug)
    events = m._propagate(f, g)
    new_frm, new_to, event = propagate(make_cell(df, uf), make_cell(dg, ug), 0, radix)
    assert (events or None) == ([(0, event)] if event else None)
    assert m.tape.digits[f][0] == new_frm.digits[0]
    assert m.tape.digits[g][0] == new_to.digits[0]
    assert bool(m.tape.unders[f]) == new_frm.underlines[0]
    assert bool(m.tape.unders[g]) == new_to.underlines[0]


# -- injection and sign tracking ---------------------------------------------


def test_inject_fresh_inc():
    m = Machine(1, 4)
    m.submit(INC1)
    m.run_steps(2)
    tape = m.tape
    pos0 = tape.digits[tape.head + tape.arrows[tape.head]]
    assert pos0 == [1]
    assert m.sign(1) == SignResponse.POSITIVE


def test_inject_inc_then_dec_restores_zero():
    m = Machine(1, 4)
    m.submit(INC1)
    m.run_steps(2)
    m.submit(DEC1)
    m.run_steps(2)
    assert m.sign(1) == SignResponse.ZERO
    tape = m.tape
    assert tape.digits[tape.head + tape.arrows[tape.head]] == [0]


def test_sign_query_answered_at_injection():
    m = Machine(1, 4)
    m.submit(INC1)
    m.submit(SIGN1)
    outcomes = m.run_trace(2)
    assert outcomes[0].responses is None
    assert outcomes[1].injected
    assert outcomes[1].responses == (SignResponse.POSITIVE,)


def test_submit_queue_contract():
    m = Machine(1, 4)
    m.submit(INC1)
    assert not m.can_accept(INC1)
    with pytest.raises(QueueFull):
        m.submit(INC1)
    m.run_steps(3)  # injection happens by step 2, freeing the slot
    m.submit(INC1)
    m.submit(SIGN1)
    m.submit(SIGN1)  # sign queries collapse, never rejected
    with pytest.raises(ValueError):
        m.submit(Command(2, CommandKind.INC))


def test_rule_codes_round_trip():
    m = Machine(1, 4)
    rules = array("b")
    m.run_steps(50, source=all_inc(), rules_out=rules)
    m2 = Machine(1, 4)
    for code in rules:
        assert rule_of_code(code) == m2.match_rule()
        m2.step()


def test_no_rule_matches_on_corrupt_head():
    m = Machine(1, 4)
    m.tape.primes[m.tape.head] = 1
    with pytest.raises(NoRuleMatches):
        m.match_rule()
    with pytest.raises(NoRuleMatches):
        m.step()


def test_machine_copy_detached():
    m = Machine(2, 4, ghost=True)
    m.run_steps(100, source=random_commands(random.Random(1), 2))
    dup = m.copy()
    m.run_steps(50)
    assert dup.step_count == 100 and m.step_count == 150
    assert dup.tape != m.tape


# -- differential and structural invariants ----------------------------------


@pytest.mark.parametrize("k,seed", [(1, 0), (2, 1), (3, 2)])
def test_verified_run_random_streams(k, seed):
    machine = Machine(k, 4, ghost=True)
    run = VerifiedRun(machine, random_commands(random.Random(seed), k), deep_every=1)
    assert run.run(1500) == []


def test_verified_run_all_inc():
    machine = Machine(1, 4, ghost=True)
    run = VerifiedRun(machine, all_inc(), deep_every=7)
    assert run.run(4000) == []


def test_verified_run_detects_corruption():
    machine = Machine(1, 4, ghost=True)
    run = VerifiedRun(machine, all_inc(), deep_every=1).corrupt_at(150)
    violations = run.run(400)
    assert violations
    assert all(int(v.split()[1].rstrip(":")) >= 150 for v in violations[:1])


def test_zero_detection_across_crossings():
    """Walk the count over zero repeatedly; sign bits must track the oracle."""
    machine = Machine(1, 4, ghost=True)
    pattern = [INC1, INC1, DEC1, DEC1, DEC1, INC1] * 120
    run = VerifiedRun(machine, iter(pattern), deep_every=1)
    assert run.run(2500) == []


def test_observation6_on_reachable_configurations():
    m = Machine(1, 4, ghost=True)
    for _ in range(300):
        m.step()
        assert observation6_violations(m.tape) == []


def test_underlines_on_reachable_configurations():
    m = Machine(1, 4, ghost=True)
    src = random_commands(random.Random(5), 1)
    held = None
    for _ in range(600):
        held, _done = m._admit(src, held)
        m.step()
        assert underline_violations(m.tape) == []


def test_injection_spacing_small():
    m = Machine(1, 4)
    m.run_steps(10_000)
    assert m.max_injection_gap <= 3
    assert m.injections >= 10_000 // 3


def test_first_injection_by_step_two():
    m = Machine(1, 4)
    outcomes = m.run_trace(2)
    assert outcomes[1].injected


def test_higher_radix_same_motion():
    rules4, rules8 = array("b"), array("b")
    Machine(1, 4).run_steps(3000, source=all_inc(), rules_out=rules4)
    Machine(1, 8).run_steps(3000, source=all_inc(), rules_out=rules8)
    assert rules4 == rules8


def test_higher_radix_digit_bound():
    m = Machine(1, 8, ghost=True)
    run = VerifiedRun(m, all_inc(), deep_every=17)
    assert run.run(5000) == []
    assert m.max_abs_digit <= 7


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3))
def test_fuzz_no_rule_ever_fails_to_match(seed, k):
    m = Machine(k, 4)
    m.run_steps(300, source=random_commands(random.Random(seed), k))
    assert m.step_count == 300
