"""Real-time simulation of k independent counters on one sequential tape."""

from .commands import (Command, CommandKind, CommandSyntaxError, OracleCounter,
                       SignResponse, all_inc, parse_command_text, random_commands)
from .engine import (EngineConfig, Machine, NoRuleMatches, QueueFull, Rule,
                     StepOutcome, propagate, rule_of_code)
from .realtime import PhaseInvariantError, RealTimeMachine
from .schedule import (Move, MoveKind, MoveTrace, PermutationSim, TourSpec,
                       TourVariant, binary_carry_schedule, check_opportunity_spacing,
                       iter_tour_infinity, simulate_permutation, tour_infinity,
                       tour_length, tour_moves)
from .tape import Arrow, Cell, GhostDisabledError, ParseError, Tape, parse_rendered

__all__ = [
    "Arrow", "Cell", "Command", "CommandKind", "CommandSyntaxError",
    "EngineConfig", "GhostDisabledError", "Machine", "Move", "MoveKind",
    "MoveTrace", "NoRuleMatches", "OracleCounter", "ParseError",
    "PermutationSim", "PhaseInvariantError", "QueueFull", "RealTimeMachine",
    "Rule", "SignResponse", "StepOutcome", "Tape", "TourSpec", "TourVariant",
    "all_inc", "binary_carry_schedule", "check_opportunity_spacing",
    "iter_tour_infinity", "parse_command_text", "parse_rendered", "propagate",
    "random_commands", "rule_of_code", "simulate_permutation", "tour_infinity",
    "tour_length", "tour_moves",
]

__version__ = "0.1.0"
