import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import lst, nat
from polyprog import natexpr as nx
from polyprog.core import value_diagram
from polyprog.interp import (
    CellInterp, NotSimple, check_compatibility, check_simple, current_preserving, derive_P, derive_Q,
    derive_R, derive_S, eval_current, eval_heat, heat_history, structure_heat, symbolic, verify_bounds,
)


def poly(text, names=("x", "y")):
    return nx.parse_expr(text, names)


def same(e, text, names=("x", "y")):
    return nx.equivalent(e, poly(text, names))


def test_constructor_current_counts_cells(sortprog):
    p, interp = sortprog
    for xs in [(), (3,), (1, 2, 3, 4)]:
        t = lst(p, xs)
        # a=1 everywhere, so the current is the number of constructors
        assert eval_current(value_diagram([t]), interp, ()) == (t.size(),)
        assert eval_heat(value_diagram([t]), interp, ()) == 0


def test_two_cons_sort_rule_by_hand(sortprog):
    p, interp = sortprog
    r = p.rule("sort_3")
    for i, j, k in itertools.product(range(1, 9), repeat=3):
        lhs_cur = eval_current(r.lhs, interp, (i, j, k))
        assert lhs_cur == eval_current(r.rhs, interp, (i, j, k)) == (i + j + k + 2,)
        lh, rh = eval_heat(r.lhs, interp, (i, j, k)), eval_heat(r.rhs, interp, (i, j, k))
        assert lh == 2 * (i + j + k + 2) ** 2
        assert lh > rh


def test_symbolic_matches_pointwise(sortprog):
    p, interp = sortprog
    for r in p.rules:
        cur, heat = symbolic(r.rhs, interp)
        f = heat.compile()
        for point in itertools.product(range(1, 4), repeat=r.arity):
            assert f(point) == eval_heat(r.rhs, interp, point)
            assert tuple(e.eval(point) for e in cur) == eval_current(r.rhs, interp, point)


def test_arith_is_simple(arith):
    p, interp = arith
    rep = check_simple(p, interp, 8)
    assert rep.simple, rep.violations
    assert (rep.a, rep.K) == (1, 1)
    assert all(c.compatible for c in rep.rules)


def test_sort_interpretation_report(sortprog):
    p, interp = sortprog
    rep = check_simple(p, interp, 8)
    assert (rep.a, rep.K) == (1, 1)
    bad = {c.rule for c in rep.rules if not c.compatible}
    # the split heat i does not pay for the recursive call on the two-cons case
    assert bad == {"split_1", "split_2", "split_3"}
    split3 = next(c for c in rep.rules if c.rule == "split_3")
    assert split3.witness == (1, 2, 2)


def test_a_colder_sort_heat_is_caught(sortprog):
    p, interp = sortprog
    cold = interp.replace("sort", CellInterp((nx.Var(0),), nx.Var(0)))
    res = check_compatibility(p.rule("sort_3"), cold, 8)
    assert res.status == "violation"
    assert res.witness == (1, 1, 1)
    assert res.lhs_heat < res.rhs_heat


def test_weak_compatibility_is_reported():
    from polyprog import load

    src = """polygraph w
sorts nat
constructors
  z : * -> nat  a=1
functions
  f : nat -> nat
rules
  f(x) => x
interpretation
  f(i): current i; heat 0
"""
    loaded = load(src)
    res = check_compatibility(loaded.program.rule("f_1"), loaded.interpretation, 4)
    assert res.status == "weakly-compatible" and res.weak and not res.compatible


def test_current_preservation(arith):
    p, interp = arith
    assert current_preserving(p.rule("add_2"), interp) is None
    assert current_preserving(p.rule("mult_1"), interp) is not None


def test_not_superadditive_is_rejected(arith):
    p, interp = arith
    bad = interp.replace("add", CellInterp((nx.Var(0),), nx.Var(0)))
    rep = check_simple(p, bad, 4)
    assert not rep.simple
    assert any("superadditive" in v for v in rep.violations)


def test_derived_bounds_for_sort(sortprog):
    _, interp = sortprog
    assert same(derive_P("sort", interp), "x")
    assert same(derive_P("split", interp), "x")
    assert same(derive_P("merge", interp), "x + y")
    assert same(derive_Q("sort", interp), "2*x^2")
    assert same(derive_Q("split", interp), "x")
    assert same(derive_Q("merge", interp), "x + y")
    assert same(derive_S("sort", interp), "x^2")
    assert same(derive_S("split", interp), "x^2")
    assert same(derive_S("merge", interp), "(x + y)^2")
    assert same(derive_R("merge", interp), "(x + y)*(1 + (x + y)^2)")


def test_derived_bounds_for_arith(arith):
    _, interp = arith
    assert same(derive_P("mult", interp), "x*y + x + y")
    assert same(derive_Q("mult", interp), "(x + 1)*y")
    assert same(derive_S("add", interp), "(x + y)^2")


def test_verify_bounds_on_mult(arith):
    p, interp = arith
    rep = verify_bounds(p, interp, "mult", [nat(p, 3), nat(p, 2)])
    assert rep.passed and rep.heat_passed
    assert [c.name for c in rep.checks] == ["size-values", "P", "Q", "QS", "R"]
    assert rep.k <= rep.Q.eval(rep.sizes)
    assert rep.outputs[0].size() == 7


def test_verify_bounds_refuses_non_simple(sortprog):
    p, interp = sortprog
    with pytest.raises(NotSimple) as e:
        verify_bounds(p, interp, "sort", [lst(p, [2, 1])])
    assert not e.value.report.simple


def test_structure_heat_counts_only_structure_cells(arith):
    p, interp = arith
    r = p.rule("mult_2")
    assert structure_heat(r.rhs, interp, (3, 4)) == 9


@given(st.integers(0, 6), st.integers(0, 6))
def test_heat_falls_along_arith_runs(m, n):
    from polyprog import builtin_arith

    p, interp = builtin_arith()
    hist = heat_history(p, interp, "mult", [nat(p, m), nat(p, n)])
    for (kind, h, sh), (_, h0, sh0) in zip(hist[1:], hist):
        if kind == "computation":
            assert h < h0
        else:
            assert h <= h0 and sh < sh0
