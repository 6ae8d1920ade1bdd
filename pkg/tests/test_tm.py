import itertools

import pytest

from polyprog.core import decode_values
from polyprog.engine import evaluate, initial_diagram, normalize
from polyprog.interp import check_simple, verify_bounds
from polyprog.suite import fixture_machine
from polyprog.syntax import format_value, load, parse_value
from polyprog.tm import (
    NondeterministicMachine, StepLimit, TMFormatError, clocked_source, compile_clocked_tm, compile_tm,
    parse_tm, tm_simulate, tm_source,
)

LOOP = """machine loop
alphabet 0
initial q
halt h
transitions
  q 0 -> q 0 R
  q _ -> q _ R
"""


def word(program, w):
    return parse_value(repr(w), "word", program.signature)


def run(program, w):
    main = program.signature.cell("main")
    final, trace = normalize(initial_diagram(main, [word(program, w)]), program)
    out = format_value(decode_values(final)[0], program.signature).strip('"')
    return out, trace


@pytest.mark.parametrize("w, out, steps", [
    ("", "1", 2), ("0", "1", 2), ("011", "111", 2), ("1", "01", 4), ("111", "0001", 8), ("101", "011", 4),
])
def test_increment_by_simulation(w, out, steps):
    assert tm_simulate(fixture_machine("increment"), w) == (out, steps)


def test_halt_machine_does_nothing():
    tm = fixture_machine("halt")
    assert tm_simulate(tm, "abba") == ("abba", 0)


def test_increment_stays_within_its_clock():
    tm = fixture_machine("increment")
    for n in range(9):
        worst = max(tm_simulate(tm, "".join(w))[1] for w in itertools.product("01", repeat=n))
        assert worst <= 2 * n + 2


def test_step_limit():
    with pytest.raises(StepLimit):
        tm_simulate(parse_tm(LOOP), "0", max_steps=50)


@pytest.mark.parametrize("text, where", [
    ("alphabet 0\ninitial q\nhalt h\ntransitions\n  q 0 -> h 0 R\n", "no transition for state q reading _"),
    ("alphabet 01\ninitial q\n", "single alphanumeric"),
    ("alphabet 0\ninitial q\ntransitions\n  q 0 -> q 2 R\n", "not in the alphabet"),
    ("alphabet 0\ninitial q\ntransitions\n  q 0 -> q 0 U\n", "move must be"),
    ("initial q\n", "alphabet"),
    ("alphabet 0\nbogus\n", "unexpected line"),
])
def test_format_errors(text, where):
    with pytest.raises(TMFormatError, match=where):
        parse_tm(text)


def test_format_error_carries_the_line():
    with pytest.raises(TMFormatError) as e:
        parse_tm("alphabet 0\ninitial q\ntransitions\n  q 0 -> q 0 U\n")
    assert e.value.line == 4


def test_halting_states_have_no_transitions():
    with pytest.raises(TMFormatError, match="halting state"):
        parse_tm("alphabet 0\ninitial q\nhalt q\ntransitions\n  q 0 -> q 0 R\n")


def test_nondeterminism_is_opt_in():
    text = LOOP + "  q 0 -> h 0 L\n"
    tm = parse_tm(text)
    assert not tm.deterministic
    with pytest.raises(NondeterministicMachine):
        tm_source(tm)
    with pytest.raises(NondeterministicMachine):
        tm_simulate(tm, "0")
    assert compile_tm(tm, allow_nondeterminism=True).rules


def test_compiled_source_reads_back():
    tm = fixture_machine("increment")
    text = tm_source(tm)
    assert load(text).program.signature.cell("main").target == ("word",)
    # one function per (state, letter) on non-halting states and the halting ones
    steps = [c for c in load(text).program.signature.functions() if c.name.startswith("step_")]
    assert len(steps) == len(tm.states) * len(tm.letters)


@pytest.mark.parametrize("name", ["halt", "increment"])
def test_bisimulation(name):
    tm = fixture_machine(name)
    program = compile_tm(tm)
    for n in range(9):
        for w in itertools.product(tm.alphabet, repeat=n):
            w = "".join(w)
            expected, transitions = tm_simulate(tm, w)
            out, trace = run(program, w)
            assert out == expected, w
            # one step to start, one per transition, one to finish
            assert trace.k == transitions + 2, w


def test_clocked_increment_is_simple():
    program, interp = compile_clocked_tm(fixture_machine("increment"), "2*n+2")
    rep = check_simple(program, interp, 6)
    assert rep.simple, rep.violations[:3]
    assert rep.a == 1


def test_clocked_agrees_with_plain():
    tm = fixture_machine("increment")
    plain = compile_tm(tm)
    clocked, _ = compile_clocked_tm(tm, "2*n+2")
    for n in range(7):
        for w in itertools.product("01", repeat=n):
            w = "".join(w)
            a = evaluate(plain, "main", [word(plain, w)])
            b = evaluate(clocked, "main", [word(clocked, w)])
            assert format_value(a[0], plain.signature) == format_value(b[0], clocked.signature)


def test_short_clock_cuts_the_run():
    tm = fixture_machine("increment")
    clocked, _ = compile_clocked_tm(tm, "1")
    # the clock runs out before the carry comes back
    out, _ = run(clocked, "111")
    assert out != tm_simulate(tm, "111")[0]


def test_clocked_bounds_hold():
    program, interp = compile_clocked_tm(fixture_machine("increment"), "2*n+2")
    rep = verify_bounds(program, interp, "main", [word(program, "0111")], bound=6)
    assert rep.passed and rep.heat_passed


def test_clock_polynomial_syntax():
    assert "mult" in clocked_source(fixture_machine("halt"), "n*n+1")
    for bad in ("n +", "m + 1"):
        with pytest.raises(TMFormatError):
            clocked_source(fixture_machine("halt"), bad)
