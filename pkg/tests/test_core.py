import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyprog.core import (
    Kind, Signature, Slice, Term, TwoCell, TypeMismatch, canonical_form, cell_count, cell_diagram,
    compose_parallel, compose_sequential, compose_slices, decode_values, delta_cell, eps_cell,
    from_slices, identity, reslice, slicing, structure_count, tau_cell, term_slices, validate,
    value_diagram,
)

Z = TwoCell("z", (), ("nat",), Kind.CONSTRUCTOR)
S = TwoCell("s", ("nat",), ("nat",), Kind.CONSTRUCTOR)
ADD = TwoCell("add", ("nat", "nat"), ("nat",), Kind.FUNCTION)
SIG = Signature(["nat"], [Z, S, ADD])


def numeral(n):
    t = Term(Z)
    for _ in range(n):
        t = Term(S, None, (t,))
    return t


def test_identity_has_no_cells():
    d = identity(["nat", "nat"])
    assert cell_count(d) == 0 and d.inputs == d.outputs == ("nat", "nat")
    assert validate(d, SIG) == []


def test_sequential_composition_checks_sorts():
    with pytest.raises(TypeMismatch):
        compose_sequential(identity(["nat"]), identity(["nat", "nat"]))


def test_parallel_then_sequential():
    two = compose_parallel(cell_diagram(S), cell_diagram(S))
    d = compose_sequential(two, cell_diagram(ADD))
    assert d.inputs == ("nat", "nat") and d.outputs == ("nat",)
    assert cell_count(d) == 3 and validate(d, SIG) == []


def test_identity_is_neutral():
    f = cell_diagram(ADD)
    assert compose_sequential(identity(["nat", "nat"]), f) == f
    assert compose_sequential(f, identity(["nat"])) == f


def test_structure_cells_have_fixed_shapes():
    assert tau_cell("a", "b").target == ("b", "a")
    assert delta_cell("a").target == ("a", "a")
    assert eps_cell("a").target == ()
    assert tau_cell("a", "b") is tau_cell("a", "b")


def test_validate_reports_sharing_and_sort_errors():
    bad = from_slices(["nat"], [Slice(0, S)])
    broken = type(bad)(bad.inputs, bad.outputs, bad.nodes, {0: [(-1, 0)]}, [(-1, 0), (0, 0)])
    kinds = {v.kind for v in validate(broken, SIG)}
    assert "sharing" in kinds


def test_from_slices_rejects_a_misplaced_cell():
    with pytest.raises((ValueError, TypeMismatch)):
        from_slices(["nat"], [Slice(1, S)])


def test_structure_count():
    d = from_slices(["nat"], [Slice(0, delta_cell("nat")), Slice(0, ADD)])
    assert structure_count(d) == 1


def test_canonical_form_ignores_node_ids():
    a = from_slices(["nat", "nat"], [Slice(0, S), Slice(1, S), Slice(0, ADD)])
    b = from_slices(["nat", "nat"], [Slice(1, S), Slice(0, S), Slice(0, ADD)])
    assert canonical_form(a) == canonical_form(b)
    c = from_slices(["nat", "nat"], [Slice(0, S), Slice(0, ADD)])
    assert canonical_form(a) != canonical_form(c)


def test_canonical_form_sees_wire_order():
    a = from_slices(["nat", "nat"], [Slice(0, ADD)])
    b = from_slices(["nat", "nat"], [Slice(0, tau_cell("nat", "nat")), Slice(0, ADD)])
    assert canonical_form(a) != canonical_form(b)


def test_values_round_trip():
    terms = (numeral(3), numeral(0), numeral(5))
    assert decode_values(value_diagram(terms)) == terms


def test_deep_numeral_does_not_hit_the_recursion_limit():
    t = numeral(5000)
    assert t.size() == 5001
    back, = decode_values(value_diagram([t]))
    depth = 0
    while back.args:
        assert back.cell is S
        back, depth = back.args[0], depth + 1
    assert depth == 5000 and back.cell is Z
    assert len(term_slices([t])) == 5001


def test_compose_slices_agrees_with_from_slices():
    sl = [Slice(0, S), Slice(1, delta_cell("nat")), Slice(0, ADD), Slice(0, tau_cell("nat", "nat"))]
    assert compose_slices(["nat", "nat"], sl) == from_slices(["nat", "nat"], sl)


@st.composite
def slice_programs(draw):
    """Random well-sorted slice sequences over one sort."""
    width = draw(st.integers(1, 4))
    out, w = [], width
    for _ in range(draw(st.integers(0, 10))):
        options = [S, delta_cell("nat")] + ([ADD, tau_cell("nat", "nat")] if w >= 2 else []) + (
            [eps_cell("nat")] if w >= 2 else []) + [Z]
        c = draw(st.sampled_from(options))
        k = draw(st.integers(0, w - len(c.source)))
        out.append(Slice(k, c))
        w += len(c.target) - len(c.source)
    return ["nat"] * width, out


@given(slice_programs(), st.integers(0, 2**32))
def test_reslicing_preserves_the_diagram(prog, seed):
    inputs, sl = prog
    d = from_slices(inputs, sl)
    again = from_slices(inputs, reslice(sl, random.Random(seed)))
    assert canonical_form(again) == canonical_form(d)


@given(slice_programs())
def test_slicing_reads_a_diagram_back(prog):
    inputs, sl = prog
    d = from_slices(inputs, sl)
    try:
        back = slicing(d)
    except ValueError:
        return  # several disconnected closed pieces may not have a canonical placement
    assert canonical_form(from_slices(inputs, back)) == canonical_form(d)


@given(slice_programs(), slice_programs())
def test_interchange_law(p, q):
    (xi, fs), (yi, gs) = p, q
    f, g = from_slices(xi, fs), from_slices(yi, gs)
    # (f ⋆₀ id) ⋆₁ (id ⋆₀ g) = f ⋆₀ g = (id ⋆₀ g) ⋆₁ (f ⋆₀ id)
    left = compose_sequential(compose_parallel(f, identity(yi)), compose_parallel(identity(f.outputs), g))
    right = compose_sequential(compose_parallel(identity(xi), g), compose_parallel(f, identity(g.outputs)))
    assert left == compose_parallel(f, g) == right


@given(slice_programs(), slice_programs(), slice_programs())
def test_parallel_composition_is_associative(p, q, r):
    f, g, h = (from_slices(*x) for x in (p, q, r))
    assert compose_parallel(compose_parallel(f, g), h) == compose_parallel(f, compose_parallel(g, h))
