import pytest

from polyprog.core import Kind, structure_count
from polyprog.suite import data_text
from polyprog.syntax import (
    ElaborationError, ProgramError, format_program, format_value, load, parse_program, parse_value,
)

ARITH_HEAD = """polygraph t
sorts nat
constructors
  z : * -> nat
  s : nat -> nat
functions
  f : nat nat -> nat
rules
"""


@pytest.mark.parametrize("name", ["arith.poly", "sort.poly", "coin.poly"])
def test_print_then_parse_is_stable(name):
    ast = parse_program(data_text(name))
    printed = format_program(ast)
    again = parse_program(printed)
    assert again == ast
    assert format_program(again) == printed


def test_sort_rule_with_two_recursive_calls_has_one_crossing():
    prog = load(data_text("sort.poly")).program
    rhs = prog.rule("sort_3").rhs
    kinds = [nd.cell.kind for nd in rhs.nodes.values()]
    assert structure_count(rhs) == 1 and kinds.count(Kind.TAU) == 1


def test_mult_recursion_has_exactly_one_dup():
    prog = load(data_text("arith.poly")).program
    rhs = prog.rule("mult_2").rhs
    assert [nd.cell.kind for nd in rhs.nodes.values()].count(Kind.DELTA) == 1
    assert structure_count(rhs) == 1


def test_variable_used_twice_is_rejected():
    with pytest.raises(ElaborationError, match="used twice"):
        load(ARITH_HEAD + "  f(x, y) => let () = erase(y) in f(x, x)\n")


def test_unused_variable_is_rejected():
    with pytest.raises(ElaborationError, match="never used"):
        load(ARITH_HEAD + "  f(x, y) => x\n")


def test_unknown_cell_is_rejected():
    with pytest.raises(ElaborationError, match="unknown"):
        load(ARITH_HEAD + "  f(x, y) => g(x, y)\n")


def test_sort_mismatch_is_rejected():
    text = ARITH_HEAD.replace("sorts nat", "sorts nat w").replace(
        "functions", "  e : * -> w\nfunctions") + "  f(x, y) => let () = erase(x) in let () = erase(y) in e\n"
    with pytest.raises(ElaborationError):
        load(text)


def test_syntax_errors_carry_positions():
    with pytest.raises(ProgramError) as info:
        load(ARITH_HEAD + "  f(x, y) => s(x y)\n")
    assert info.value.line == 9 and info.value.col is not None


def test_dup_and_erase_become_structure_cells():
    prog = load(ARITH_HEAD + "  f(x, y) => let (a, b) = dup(x) in let () = erase(y) in f(a, b)\n").program
    kinds = sorted(nd.cell.kind.value for nd in prog.rule("f_1").rhs.nodes.values())
    assert kinds == ["delta", "eps", "function"]


def test_crossed_arguments_get_a_swap():
    prog = load(ARITH_HEAD + "  f(x, y) => f(y, x)\n").program
    assert [nd.cell.kind for nd in prog.rule("f_1").rhs.nodes.values()].count(Kind.TAU) == 1


def test_decimal_numbers_are_numerals():
    prog = load(ARITH_HEAD + "  f(x, y) => let () = erase(x) in let () = erase(y) in 2\n").program
    assert len(prog.rule("f_1").rhs.nodes) == 2 + 3


def test_guard_variables_must_be_bound():
    text = data_text("sort.poly").replace("when p <= q", "when p <= r")
    with pytest.raises(ProgramError):
        load(text)


def test_interpretation_arity_is_checked():
    text = data_text("arith.poly").replace("add(i, j): current i + j", "add(i): current i")
    with pytest.raises(ProgramError):
        load(text)


def test_values_parse_and_print(sortprog, arith):
    sig = sortprog[0].signature
    v = parse_value("[3, 1,2]", "list", sig)
    assert format_value(v, sig) == "[3,1,2]"
    assert format_value(parse_value("4", "nat", arith[0].signature), arith[0].signature) == "4"
    assert format_value(parse_value("s(s(z))", "nat", arith[0].signature), arith[0].signature) == "2"
    with pytest.raises(ProgramError):
        parse_value("[1]", "nat", arith[0].signature)


def test_constructor_constants_default_to_one():
    loaded = load(data_text("arith.poly").replace("a=1", ""))
    assert loaded.interpretation.a == 1
