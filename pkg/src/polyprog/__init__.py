"""Polygraphic programs: string-diagram rewriting with polynomial
interpretations for termination and complexity bounds."""
from .core import (
    Diagram, Kind, Node, Signature, Slice, Term, TwoCell, canonical_form, compose_parallel,
    compose_sequential, decode_values, from_slices, identity, reslice, validate, value_diagram,
)
from .engine import (
    BudgetExhausted, FuelExhausted, Trace, apply, enumerate_normal_forms, evaluate, find_redexes,
    initial_diagram, normalize, value_max, value_order,
)
from .interp import (
    CellInterp, Interpretation, NotSimple, check_compatibility, check_simple, derive_P, derive_Q,
    derive_R, derive_S, eval_current, eval_heat, structure_heat, verify_bounds,
)
from .rules import Program, Rule, RuleKind
from .suite import builtin_arith, builtin_coin, builtin_sort, fixture_machine
from .syntax import format_value, load, load_file, parse_value
from .tm import TuringMachine, compile_clocked_tm, compile_tm, parse_tm, tm_simulate

__version__ = "0.1.0"

__all__ = [
    "apply", "BudgetExhausted", "builtin_arith", "builtin_coin", "builtin_sort", "canonical_form",
    "CellInterp", "check_compatibility", "check_simple", "compile_clocked_tm", "compile_tm",
    "compose_parallel", "compose_sequential", "decode_values", "derive_P", "derive_Q", "derive_R",
    "derive_S", "Diagram", "enumerate_normal_forms", "eval_current", "eval_heat", "evaluate",
    "find_redexes", "fixture_machine", "format_value", "from_slices", "FuelExhausted", "identity",
    "initial_diagram", "Interpretation", "Kind", "load", "load_file", "Node", "normalize",
    "NotSimple", "parse_tm", "parse_value", "Program", "reslice", "Rule", "RuleKind", "Signature",
    "Slice", "structure_heat", "Term", "tm_simulate", "Trace", "TuringMachine", "TwoCell",
    "validate", "value_diagram", "value_max", "value_order", "verify_bounds",
]
