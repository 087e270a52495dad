import json

import pytest

from tapecount import golden
from tapecount.cli import check_golden, diff_renders, main, trace_run
from tapecount.commands import all_inc
from tapecount.engine import Machine
from tapecount.tape import parse_rendered


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_six_step_trace_text(capsys):
    code, out, _ = run_cli(capsys, "run", "--preset", "all-inc", "--steps", "6", "--trace")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 6
    for line, want in zip(lines, golden.SIX_STEP_RENDERS):
        assert line.endswith(want)
    rules = [int(line.split("rule")[1].split()[0]) for line in lines]
    assert rules == [r for r, _ in golden.SIX_STEP_RULES]


def test_run_trace_jsonl_round_trips(capsys):
    code, out, _ = run_cli(capsys, "run", "--preset", "all-inc", "--steps", "6",
                           "--trace", "--format", "jsonl")
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert [r["rule"] for r in records] == ["R1", "R2", "R1", "R3", "R4", "R2"]
    assert [r["mirrored"] for r in records] == [m for _, m in golden.SIX_STEP_RULES]
    assert [r["injected"] for r in records] == [False, True, False, True, False, True]
    for record in records:
        window = record["window"]
        assert parse_rendered(window).render(*_window_span(window)) == window


def _window_span(text):
    tokens = text.split()
    head = next(i for i, tok in enumerate(tokens) if tok.endswith("*"))
    return -head, len(tokens) - head - 1


def test_run_zero_steps_prints_initial_tape(capsys):
    code, out, _ = run_cli(capsys, "run", "--k", "2", "--steps", "0")
    assert code == 0
    assert out.strip() == "<0 <0 <0' >* >0 >0"


def test_run_stats(capsys):
    code, out, _ = run_cli(capsys, "stats", "--preset", "all-inc", "--steps", "100")
    assert code == 0
    assert "injections:" in out and "max injection gap:  3" in out


def test_run_delay1_mode(capsys):
    code, out, _ = run_cli(capsys, "run", "--mode", "delay1", "--preset", "random",
                           "--seed", "5", "--k", "2", "--steps", "500", "--stats")
    assert code == 0
    assert "phases:" in out


def test_schedule_outputs(capsys):
    code, out, _ = run_cli(capsys, "schedule", "--carry", "16")
    assert code == 0
    assert out.strip() == "0 1 0 2 0 1 0 3 0 1 0 2 0 1 0 4"
    code, out, _ = run_cli(capsys, "schedule", "--moves", "3")
    assert code == 0
    kinds = [line.split()[1] for line in out.strip().splitlines()]
    assert kinds == ["NEG_TOUR0", "POS_TOUR0_PRIMED", "NEG_TOUR0"]
    code, out, _ = run_cli(capsys, "schedule", "--permute", "1")
    assert code == 0
    assert out.startswith("0 * 1 2 3")
    code, _, err = run_cli(capsys, "schedule")
    assert code == 2 and "nothing requested" in err


def test_verify_clean(capsys):
    code, out, _ = run_cli(capsys, "verify", "--k", "2", "--preset", "random",
                           "--seed", "9", "--steps", "2000")
    assert code == 0
    assert "0 violation(s)" in out


def test_verify_reports_corruption(capsys):
    code, out, err = run_cli(capsys, "verify", "--k", "1", "--preset", "random",
                             "--seed", "9", "--steps", "600", "--corrupt-at", "333")
    assert code == 1
    assert "step 333" in err


def test_verify_delay1(capsys):
    code, out, _ = run_cli(capsys, "verify", "--mode", "delay1", "--k", "2",
                           "--preset", "random", "--seed", "4", "--steps", "3000")
    assert code == 0
    assert "delay histogram {1:" in out


def test_command_file_round_trip(tmp_path, capsys):
    path = tmp_path / "cmds.txt"
    path.write_text("# demo\ninc 1\ninc 1\nsign 1\n")
    code, out, _ = run_cli(capsys, "run", "--commands", str(path), "--steps", "8")
    assert code == 0


def test_command_file_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "cmds.txt"
    path.write_text("inc 1\nwobble 2\n")
    code, _, err = run_cli(capsys, "run", "--commands", str(path), "--steps", "8", "--k", "2")
    assert code == 2
    assert "line 2" in err


def test_trace_run_window_matches_published_display():
    records, _, window = trace_run(lambda: Machine(1, 4), lambda: all_inc(), 6)
    assert window == golden.SIX_STEP_WINDOW
    assert [r.window for r in records] == golden.SIX_STEP_RENDERS


def test_check_golden_negative_control(golden_run):
    assert check_golden(golden_run.machine) == []
    perturbed = golden_run.machine.copy()
    slot = perturbed.tape.origin  # flip one prime: must be reported with a diff
    perturbed.tape.primes[slot] = 2
    problems = check_golden(perturbed)
    assert problems and "configuration mismatch" in problems[0]
    assert "-" in diff_renders(golden.BIG_RUN_RENDER, perturbed.tape.render_extent())
