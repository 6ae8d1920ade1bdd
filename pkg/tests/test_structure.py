import itertools

import pytest

from polyprog.core import canonical_form, cell_count, delta_cell, eps_cell, tau_cell, validate
from polyprog.interp import check_structure_rules, eval_current, structure_heat
from polyprog.rules import RuleKind
from polyprog.structure import (
    delta_path, eps_path, generate_structure_rules, structure_rules_for, tau_general, tau_path,
)

SORTS = ["a", "b", "c"]


@pytest.mark.parametrize("x", [(), ("a",), ("a", "b"), ("a", "b", "c")])
def test_paths_have_the_right_boundary(x):
    assert delta_path(x).outputs == tuple(x) * 2
    assert eps_path(x).outputs == ()
    assert tau_path(x, "c").outputs == ("c",) + tuple(x)
    for d in (delta_path(x), eps_path(x), tau_path(x, "c")):
        assert validate(d) == []


def test_path_cell_counts():
    # δ over n wires needs n duplications and n(n-1)/2 swaps
    for n in range(5):
        x = ("a",) * n
        assert cell_count(delta_path(x)) == n + n * (n - 1) // 2
        assert cell_count(tau_general(x, ("b", "b"))) == 2 * n
        assert cell_count(eps_path(x)) == n


def test_tau_path_routes_wires(arith):
    _, interp = arith
    x = ("nat", "nat", "nat")
    d = tau_path(x, "nat")
    assert eval_current(d, interp, (1, 2, 3, 4)) == (4, 1, 2, 3)
    assert eval_current(delta_path(x), interp, (1, 2, 3)) == (1, 2, 3, 1, 2, 3)


def test_structure_heat_of_paths(arith):
    _, interp = arith
    assert structure_heat(tau_path(("nat", "nat"), "nat"), interp, (2, 3, 5)) == 2 * 5 + 3 * 5
    assert structure_heat(delta_path(("nat",)), interp, (4,)) == 16
    assert structure_heat(eps_path(("nat", "nat")), interp, (4, 7)) == 11


def test_rules_per_constructor(sortprog):
    p, _ = sortprog
    sig = p.signature
    rules = generate_structure_rules(sig)
    n_cons = len(sig.constructors())
    assert len(rules) == n_cons * (2 + 2 * len(sig.sorts))
    assert all(r.kind is RuleKind.STRUCTURE for r in rules)
    assert len({r.name for r in rules}) == len(rules)


def test_rules_are_found_from_the_structure_cell(sortprog):
    p, _ = sortprog
    sig = p.signature
    assert {r.name for r in structure_rules_for(sig, delta_cell("list"))} == {"nil/delta", "cons/delta"}
    assert {r.name for r in structure_rules_for(sig, eps_cell("nat"))} == {"num/eps"}
    names = {r.name for r in structure_rules_for(sig, tau_cell("nat", "list"))}
    assert names == {"num/tau-left[list]", "nil/tau-right[nat]", "cons/tau-right[nat]"}


def test_literal_constructor_rules_keep_the_literal(sortprog):
    p, _ = sortprog
    r = next(r for r in generate_structure_rules(p.signature) if r.name == "num/delta")
    lits = sorted(nd.literal for nd in r.rhs.nodes.values() if nd.literal is not None)
    assert lits == ["n", "n"]


def test_rule_sides_are_valid_and_distinct(sortprog):
    p, _ = sortprog
    for r in generate_structure_rules(p.signature):
        assert validate(r.lhs, p.signature) == []
        assert validate(r.rhs, p.signature) == []
        assert canonical_form(r.lhs) != canonical_form(r.rhs)


@pytest.mark.parametrize("which", ["arith", "sortprog"])
def test_structure_rules_preserve_current_and_cool_down(which, request):
    p, interp = request.getfixturevalue(which)
    results = check_structure_rules(generate_structure_rules(p.signature), interp, 8)
    assert results
    for r, witness, heat, sheat in results:
        assert witness is None, r.name
        assert heat.weak, r.name
        assert sheat.compatible, r.name


def test_structure_heat_drops_by_at_least_one(arith):
    p, interp = arith
    for r in generate_structure_rules(p.signature):
        for point in itertools.product(range(1, 5), repeat=len(r.lhs.inputs)):
            assert structure_heat(r.lhs, interp, point) > structure_heat(r.rhs, interp, point)
