import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyprog import natexpr as nx


def test_parse_and_format():
    e = nx.parse_expr("2*i^2 + i", ["i"])
    assert e.eval([3]) == 21
    assert str(nx.normalize(e)) == "2*x^2 + x"
    assert e.format(["i"]).replace(" ", "") in ("2*i^2+i", "i+2*i^2")


def test_ceil_floor():
    c, f = nx.parse_exprs("ceil(i/2), floor(i/2)", ["i"])
    assert [(c.eval([i]), f.eval([i])) for i in range(5)] == [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]


def test_max():
    assert nx.parse_expr("max(i, 2*j)", ["i", "j"]).eval([5, 3]) == 6


def test_normalization_is_commutative():
    a = nx.parse_expr("(x + y)^2", ["x", "y"])
    b = nx.parse_expr("y*y + 2*y*x + x*x", ["x", "y"])
    assert nx.normalize(a) == nx.normalize(b)
    assert str(nx.normalize(a)) == "x^2 + 2*x*y + y^2"


def test_unknown_name_is_a_syntax_error():
    with pytest.raises(nx.ExprSyntaxError):
        nx.parse_expr("i + k", ["i"])


def test_division_needs_a_positive_constant():
    with pytest.raises((nx.ExprSyntaxError, ValueError)):
        nx.parse_expr("ceil(i/0)", ["i"])


def test_polynomial_detection():
    assert nx.is_polynomial(nx.parse_expr("3*x*y + 1", ["x", "y"]))
    assert not nx.is_polynomial(nx.parse_expr("max(x, y)", ["x", "y"]))


exprs = st.recursive(
    st.one_of(st.integers(0, 4).map(nx.Const), st.integers(0, 1).map(nx.Var)),
    lambda sub: st.one_of(
        st.tuples(sub, sub).map(lambda p: p[0] + p[1]),
        st.tuples(sub, sub).map(lambda p: p[0] * p[1]),
        st.tuples(sub, sub).map(lambda p: nx.emax(p[0], p[1])),
        st.tuples(sub, st.integers(1, 3)).map(lambda p: nx.ceil_div(p[0], p[1])),
        st.tuples(sub, st.integers(1, 3)).map(lambda p: nx.floor_div(p[0], p[1])),
    ),
    max_leaves=8,
)
points = st.tuples(st.integers(0, 6), st.integers(0, 6))


@given(exprs, points)
def test_normal_form_denotes_the_same_map(e, p):
    assert nx.normalize(e).eval(p) == e.eval(p)


@given(exprs, points)
def test_compiled_agrees_with_eval(e, p):
    assert e.compile()(p) == e.eval(p)


@given(exprs, points, st.integers(0, 2), st.integers(0, 1))
def test_every_expression_is_monotone(e, p, bump, which):
    q = list(p)
    q[which] += bump
    assert e.eval(q) >= e.eval(p)


@given(exprs)
def test_format_parses_back(e):
    back = nx.parse_expr(str(e), ["x", "y"])
    for p in [(0, 0), (1, 2), (3, 1), (5, 5)]:
        assert back.eval(p) == e.eval(p)
