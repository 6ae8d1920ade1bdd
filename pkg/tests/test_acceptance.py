"""Acceptance criteria, one test each, run at their stated tolerances.

A summary line per criterion is printed at the end of the session.
"""
import itertools
import random
import time

import pytest

from polyprog import natexpr as nx
from polyprog.core import Term, _swap, canonical_form, decode_values, from_slices, reslice, slicing
from polyprog.engine import enumerate_normal_forms, evaluate, initial_diagram, normalize, value_max
from polyprog.interp import (
    _Meter, check_simple, check_structure_rules, derive_P, derive_Q, derive_S, eval_current, eval_heat,
    heat_checks, verify_bounds,
)
from polyprog.structure import generate_structure_rules
from polyprog.suite import builtin_arith, builtin_coin, builtin_sort, fixture_machine
from polyprog.syntax import format_value, parse_value
from polyprog.tm import compile_clocked_tm, compile_tm, tm_simulate

criterion = pytest.mark.criterion


def numeral(p, n):
    s, z = p.signature.cell("s"), p.signature.cell("z")
    t = Term(z)
    for _ in range(n):
        t = Term(s, None, (t,))
    return t


def to_int(t):
    n = 0
    while t.args:
        n, t = n + 1, t.args[0]
    return n


def literal_list(p, xs):
    sig = p.signature
    num, nil, cons = sig.cell("num"), sig.cell("nil"), sig.cell("cons")
    t = Term(nil)
    for x in reversed(xs):
        t = Term(cons, None, (Term(num, x), t))
    return t


def from_list(t):
    out = []
    while t.args:
        out.append(t.args[0].literal)
        t = t.args[1]
    return out


def sort_inputs():
    for n in range(7):
        yield from itertools.product(range(1, 6), repeat=n)


def arith_runs():
    for name in ("add", "mult"):
        for m, n in itertools.product(range(9), repeat=2):
            yield name, m, n


@criterion(1, "arithmetic semantics, 0 <= m,n <= 8, < 1 s")
def test_c01_arithmetic():
    p, _ = builtin_arith()
    t0 = time.process_time()
    wrong = []
    for name, m, n in arith_runs():
        got = to_int(evaluate(p, name, [numeral(p, m), numeral(p, n)])[0])
        if got != (m + n if name == "add" else m * n):
            wrong.append((name, m, n, got))
    elapsed = time.process_time() - t0
    print(f"criterion 1: 162 runs, {len(wrong)} wrong, {elapsed:.2f} s")
    assert not wrong
    assert elapsed < 1.0, f"{elapsed:.2f} s"


@criterion(2, "sort agrees with sorted() on all lists of length <= 6 over 1..5, < 10 s")
def test_c02_sort():
    p, _ = builtin_sort()
    phi = p.signature.cell("sort")
    t0 = time.process_time()
    wrong = []
    count = 0
    for xs in sort_inputs():
        got = from_list(evaluate(p, phi, [literal_list(p, xs)])[0])
        count += 1
        if got != sorted(xs):
            wrong.append(xs)
    elapsed = time.process_time() - t0
    print(f"criterion 2: {count} lists, {len(wrong)} wrong, {elapsed:.2f} s")
    assert count == sum(5 ** k for k in range(7))
    assert not wrong, wrong[:5]
    assert elapsed < 10.0, f"{elapsed:.2f} s"


@criterion(3, "shipped sort and arith interpretations are simple with a=1, K=1 on B=8")
def test_c03_simplicity():
    failures = []
    for name, (p, interp) in (("arith", builtin_arith()), ("sort", builtin_sort())):
        rep = check_simple(p, interp, 8)
        print(f"criterion 3: {name}: simple={rep.simple} a={rep.a} K={rep.K}")
        if not (rep.simple and rep.a == 1 and rep.K == 1):
            failures.append(f"{name}: {rep.violations[0] if rep.violations else (rep.a, rep.K)}")
    assert not failures, "; ".join(failures)


@criterion(4, "two-cons sort rule: currents i+j+k+2, heat 2(i+j+k+2)^2 and strictly decreasing")
def test_c04_worked_rule():
    p, interp = builtin_sort()
    r = p.rule("sort_3")
    for point in itertools.product(range(1, 9), repeat=3):
        total = sum(point) + 2
        assert eval_current(r.lhs, interp, point) == (total,)
        assert eval_current(r.rhs, interp, point) == (total,)
        lh = eval_heat(r.lhs, interp, point)
        assert lh == 2 * total ** 2
        assert lh - eval_heat(r.rhs, interp, point) > 0, point


@criterion(5, "derived P, Q, S for sort")
def test_c05_derived_bounds():
    _, interp = builtin_sort()
    expected = {
        ("P", "sort"): "x", ("P", "merge"): "x+y", ("P", "split"): "x",
        ("Q", "sort"): "2x^2", ("Q", "split"): "x", ("Q", "merge"): "x+y",
        ("S", "sort"): "x^2", ("S", "split"): "x^2", ("S", "merge"): "(x+y)^2",
    }
    derive = {"P": derive_P, "Q": derive_Q, "S": derive_S}
    names = ("x", "y")
    for (kind, f), text in expected.items():
        got = derive[kind](f, interp)
        print(f"criterion 5: {kind}_{f} = {got.format(names)}")
        want = nx.parse_expr(text.replace("2x", "2*x"), names)
        assert nx.equivalent(got, want), (kind, f, got.format(names))


@criterion(6, "verify_bounds: all five checks on sort (length <= 6) and mult (m,n <= 6), < 30 s")
def test_c06_bounds():
    t0 = time.process_time()
    failed: dict = {}
    runs = 0
    sp, si = builtin_sort()
    sort_report = check_simple(sp, si, 8)
    for xs in sort_inputs():
        rep = verify_bounds(sp, si, "sort", [literal_list(sp, xs)], require_simple=False,
                            simple_report=sort_report)
        runs += 1
        for c in rep.checks:
            if not c.passed:
                failed.setdefault(("sort", c.name), (xs, c.measured, c.bound))
    ap, ai = builtin_arith()
    arith_report = check_simple(ap, ai, 8)
    for m, n in itertools.product(range(7), repeat=2):
        rep = verify_bounds(ap, ai, "mult", [numeral(ap, m), numeral(ap, n)], simple_report=arith_report)
        runs += 1
        for c in rep.checks:
            if not c.passed:
                failed.setdefault(("mult", c.name), ((m, n), c.measured, c.bound))
    elapsed = time.process_time() - t0
    print(f"criterion 6: {runs} runs in {elapsed:.1f} s")
    for (prog, name), (arg, measured, bound) in sorted(failed.items()):
        print(f"criterion 6: {prog} {name} fails first on {arg}: {measured} > {bound}")
    assert not failed, "; ".join(f"{p} {c} first on {v[0]}: {v[1]} > {v[2]}" for (p, c), v in failed.items())
    assert elapsed < 30.0, f"{elapsed:.1f} s"


@criterion(7, "heat falls on every run of a certified-simple program from criteria 1-2")
def test_c07_heat_monotonicity():
    checked = skipped = 0
    bad = []
    ap, ai = builtin_arith()
    programs = [("arith", ap, ai, check_simple(ap, ai, 8).simple)]
    sp, si = builtin_sort()
    programs.append(("sort", sp, si, check_simple(sp, si, 8).simple))
    for name, p, interp, certified in programs:
        if name == "arith":
            runs = [(f, [numeral(p, m), numeral(p, n)]) for f, m, n in arith_runs()]
        else:
            runs = [("sort", [literal_list(p, xs)]) for xs in sort_inputs()]
        if not certified:
            skipped += len(runs)
            print(f"criterion 7: {name} is not certified simple; {len(runs)} runs skipped")
            continue
        for f, args in runs:
            meter = _Meter(interp)
            normalize(initial_diagram(p.signature.cell(f), args), p, meter=meter)
            checked += 1
            for c in heat_checks(meter.history):
                if not c.passed:
                    bad.append((name, f, c.name, c.detail))
    print(f"criterion 7: {checked} runs checked, {skipped} skipped, {len(bad)} violations")
    assert checked >= 162
    assert not bad, bad[:3]


@criterion(8, "structure rules current-preserving and weakly compatible on B=8, both interpretations")
def test_c08_structure_rules():
    bad = []
    total = 0
    for name, (p, interp) in (("arith", builtin_arith()), ("sort", builtin_sort())):
        for r, witness, heat, _ in check_structure_rules(generate_structure_rules(p.signature), interp, 8):
            total += 1
            if witness is not None or not heat.weak:
                bad.append((name, r.name, witness, heat.status))
    print(f"criterion 8: {total} structure rules, {len(bad)} bad")
    assert total > 0
    assert not bad, bad


@criterion(9, "compiled machines bisimulate the simulator on inputs of length <= 8")
def test_c09_bisimulation():
    for name in ("halt", "increment"):
        tm = fixture_machine(name)
        program = compile_tm(tm)
        sig = program.signature
        main = sig.cell("main")
        count = 0
        for n in range(9):
            for w in itertools.product(tm.alphabet, repeat=n):
                w = "".join(w)
                expected, transitions = tm_simulate(tm, w)
                final, trace = normalize(initial_diagram(main, [parse_value(repr(w), "word", sig)]), program)
                got = format_value(decode_values(final)[0], sig)
                assert got == f'"{expected}"', (name, w, got)
                # initialisation and finalisation are one step each
                assert trace.k - 2 == transitions, (name, w, trace.k, transitions)
                count += 1
        print(f"criterion 9: {name}: {count} inputs")


@criterion(10, "clocked increment is simple on B=6 and agrees with the plain program up to length 6")
def test_c10_clocked():
    tm = fixture_machine("increment")
    clocked, interp = compile_clocked_tm(tm, "2*n+2")
    rep = check_simple(clocked, interp, 6)
    print(f"criterion 10: simple={rep.simple} a={rep.a} K={rep.K}")
    assert rep.simple, rep.violations[:3]
    plain = compile_tm(tm)
    for n in range(7):
        for w in itertools.product(tm.alphabet, repeat=n):
            w = repr("".join(w))
            a = evaluate(plain, "main", [parse_value(w, "word", plain.signature)])
            b = evaluate(clocked, "main", [parse_value(w, "word", clocked.signature)])
            assert format_value(a[0], plain.signature) == format_value(b[0], clocked.signature), w


@criterion(11, "coin has exactly two normal forms and exhaustive evaluation picks the larger")
def test_c11_coin():
    p = builtin_coin()
    c = p.signature.cell("c")
    forms = enumerate_normal_forms(initial_diagram(c, []), p)
    values = sorted(format_value(decode_values(f)[0], p.signature) for f in forms)
    print(f"criterion 11: normal forms {values}")
    assert values == ["0", "1"]
    best = value_max([decode_values(f) for f in forms], p.signature)
    assert format_value(best[0], p.signature) == "1"


@criterion(12, "100 random reslicings keep canonical form, current and heat")
def test_c12_deformation():
    rng = random.Random(12)
    fixtures = []
    for p, interp in (builtin_arith(), builtin_sort()):
        for r in p.rules:
            fixtures += [(r.lhs, interp), (r.rhs, interp)]
    ap, ai = builtin_arith()
    fixtures.append((initial_diagram(ap.signature.cell("mult"), [numeral(ap, 2), numeral(ap, 3)]), ai))
    sp, si = builtin_sort()
    fixtures.append((initial_diagram(sp.signature.cell("sort"), [literal_list(sp, [3, 1, 2])]), si))
    # keep the diagrams that admit at least one exchange move
    fixtures = [(d, i) for d, i in fixtures
                if any(_swap(a, b) for a, b in zip(slicing(d), slicing(d)[1:]))]
    moved = 0
    for trial in range(100):
        d, interp = fixtures[trial % len(fixtures)]
        sl = slicing(d)
        again = reslice(sl, rng)
        moved += again != sl
        e = from_slices(d.inputs, again)
        point = tuple(rng.randint(1, 8) for _ in d.inputs)
        assert canonical_form(e) == canonical_form(d), trial
        assert eval_current(e, interp, point) == eval_current(d, interp, point), trial
        assert eval_heat(e, interp, point) == eval_heat(d, interp, point), trial
    print(f"criterion 12: 100 reslicings, {moved} changed the slice order")
    assert moved > 50
