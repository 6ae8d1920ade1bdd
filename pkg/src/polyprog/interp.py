"""Current and heat interpretations, simplicity checks and complexity bounds."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import natexpr as nx
from .core import IN, Diagram, Kind, Term, TwoCell, _topo, decode_values
from .engine import DEFAULT_FUEL, initial_diagram, normalize
from .natexpr import NatExpr
from .rules import Program, Rule

GRID_NOTE = "checked on a finite grid: a falsification test, not a proof"


class MissingInterpretation(KeyError):
    pass


class NotSimple(ValueError):
    def __init__(self, report: "SimpleReport"):
        super().__init__("the interpretation is not simple:\n  " + "\n  ".join(report.violations))
        self.report = report


@dataclass(frozen=True)
class CellInterp:
    """Current map (one expression per output) and heat map of a cell."""

    current: tuple
    heat: NatExpr

    def __post_init__(self):
        object.__setattr__(self, "current", tuple(self.current))


def _structure_interp(cell: TwoCell) -> CellInterp:
    x0, x1 = nx.Var(0), nx.Var(1)
    if cell.kind is Kind.TAU:
        return CellInterp((x1, x0), nx.ZERO)
    if cell.kind is Kind.DELTA:
        return CellInterp((x0, x0), nx.ZERO)
    return CellInterp((), nx.ZERO)


def _structure_heat_expr(cell: TwoCell) -> NatExpr:
    x0, x1 = nx.Var(0), nx.Var(1)
    if cell.kind is Kind.TAU:
        return nx.Mul((x0, x1))
    if cell.kind is Kind.DELTA:
        return nx.Pow(x0, 2)
    if cell.kind is Kind.EPS:
        return x0
    return nx.ZERO


class Interpretation:
    """Interpretation of every cell of a program.

    Constructors are given by their constant ``a_γ`` (current ``Σ x_i + a_γ``,
    no heat), structure cells have their fixed maps and functions are given
    explicitly.
    """

    def __init__(self, program: Program, functions: Mapping[str, CellInterp],
                 constants: Mapping[str, int] | None = None):
        self.program = program
        self.functions = dict(functions)
        sig = program.signature
        self.constants = {c.name: 1 for c in sig.constructors()}
        self.constants.update(constants or {})
        for name in self.functions:
            if name not in sig.cells or not sig.cells[name].is_function:
                raise MissingInterpretation(f"{name} is not a function of {program.name}")
        self._compiled: dict = {}

    def __repr__(self):
        return f"Interpretation({self.program.name!r}, a={self.a}, K={self.K})"

    @property
    def a(self) -> int:
        return max(self.constants.values(), default=1)

    @property
    def K(self) -> int:
        return self.program.K

    def replace(self, name: str, ci: CellInterp) -> "Interpretation":
        fns = dict(self.functions)
        fns[name] = ci
        return Interpretation(self.program, fns, self.constants)

    def of(self, cell: TwoCell) -> CellInterp:
        if cell.is_structure:
            return _structure_interp(cell)
        if cell.is_constructor:
            xs = [nx.Var(i) for i in range(len(cell.source))]
            return CellInterp((nx.esum(xs + [nx.Const(self.constants[cell.name])]),), nx.ZERO)
        try:
            return self.functions[cell.name]
        except KeyError:
            raise MissingInterpretation(f"no interpretation for {cell.name}") from None

    def compiled(self, cell: TwoCell):
        """(current, heat, structure heat) as fast Python callables."""
        got = self._compiled.get(cell.name)
        if got is None:
            ci = self.of(cell)
            cur = [e.compile() for e in ci.current]
            if len(cur) == 1:
                current = (lambda a, f=cur[0]: (f(a),))
            else:
                current = (lambda a, fs=cur: tuple(f(a) for f in fs))
            got = (
                current,
                ci.heat.compile(),
                _structure_heat_expr(cell).compile(),
            )
            self._compiled[cell.name] = got
        return got


# ------------------------------------------------------------- evaluation


def _order(d: Diagram):
    order = _topo(d)
    if order is None:
        raise ValueError("diagram has a cycle")
    return order


def _propagate(d: Diagram, interp: Interpretation, inputs: Sequence[int], which: int):
    if len(inputs) != len(d.inputs):
        raise ValueError(f"expected {len(d.inputs)} input currents, got {len(inputs)}")
    vals = {}
    heat = 0
    for n in _order(d):
        nd = d.nodes[n]
        args = tuple(inputs[j] if p == IN else vals[(p, j)] for p, j in d.src[n])
        fns = interp.compiled(nd.cell)
        for j, v in enumerate(fns[0](args)):
            vals[(n, j)] = v
        if which:
            heat += fns[which](args)
    outs = tuple(inputs[j] if p == IN else vals[(p, j)] for p, j in d.out_src)
    return outs, heat, vals


def eval_current(d: Diagram, interp: Interpretation, inputs: Sequence[int]) -> tuple:
    return _propagate(d, interp, inputs, 0)[0]


def eval_heat(d: Diagram, interp: Interpretation, inputs: Sequence[int]) -> int:
    return _propagate(d, interp, inputs, 1)[1]


def structure_heat(d: Diagram, interp: Interpretation, inputs: Sequence[int]) -> int:
    """Heat where τ, δ, ε contribute ij, i², i and other cells nothing."""
    return _propagate(d, interp, inputs, 2)[1]


def symbolic(d: Diagram, interp: Interpretation, inputs: Sequence[NatExpr] | None = None):
    """Current and heat of ``d`` as normalized expressions of its inputs."""
    if inputs is None:
        inputs = [nx.Var(i) for i in range(len(d.inputs))]
    vals = {}
    heat = []
    for n in _order(d):
        nd = d.nodes[n]
        args = [inputs[j] if p == IN else vals[(p, j)] for p, j in d.src[n]]
        ci = interp.of(nd.cell)
        for j, e in enumerate(ci.current):
            vals[(n, j)] = e.subst(args)
        heat.append(ci.heat.subst(args))
    outs = tuple(nx.normalize(inputs[j] if p == IN else vals[(p, j)]) for p, j in d.out_src)
    return outs, nx.normalize(nx.esum(heat))


def grid(m: int, bound: int, start: int = 1):
    return itertools.product(range(start, bound + 1), repeat=m)


# ---------------------------------------------------------- compatibility


@dataclass
class Compatibility:
    rule: str
    status: str  # "compatible", "weakly-compatible" or "violation"
    witness: tuple | None = None
    lhs_current: tuple | None = None
    rhs_current: tuple | None = None
    lhs_heat: int | None = None
    rhs_heat: int | None = None
    bound: int = 8
    start: int = 1

    @property
    def compatible(self) -> bool:
        return self.status == "compatible"

    @property
    def weak(self) -> bool:
        return self.status in ("compatible", "weakly-compatible")

    def __str__(self):
        head = f"{self.rule}: {self.status} on {{{self.start}..{self.bound}}}^m"
        if self.witness is None:
            return head
        return (f"{head}; witness {self.witness}: currents {self.lhs_current} vs "
                f"{self.rhs_current}, heat {self.lhs_heat} vs {self.rhs_heat}")

    def as_dict(self) -> dict:
        return {
            "rule": self.rule, "status": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "lhs_current": _lst(self.lhs_current), "rhs_current": _lst(self.rhs_current),
            "lhs_heat": self.lhs_heat, "rhs_heat": self.rhs_heat,
        }


def _lst(x):
    return list(x) if x is not None else None


def _side(d: Diagram, interp: Interpretation, heat_kind: str = "heat"):
    cur, heat = symbolic(d, interp)
    if heat_kind == "structure":
        heat = _symbolic_structure_heat(d, interp)
    fcur = [e.compile() for e in cur]
    fheat = heat.compile()
    return (lambda a: tuple(f(a) for f in fcur)), fheat


def _symbolic_structure_heat(d: Diagram, interp: Interpretation) -> NatExpr:
    inputs = [nx.Var(i) for i in range(len(d.inputs))]
    vals = {}
    heat = []
    for n in _order(d):
        nd = d.nodes[n]
        args = [inputs[j] if p == IN else vals[(p, j)] for p, j in d.src[n]]
        for j, e in enumerate(interp.of(nd.cell).current):
            vals[(n, j)] = e.subst(args)
        heat.append(_structure_heat_expr(nd.cell).subst(args))
    return nx.normalize(nx.esum(heat))


def check_compatibility(rule: Rule, interp: Interpretation, bound: int = 8, start: int = 1,
                        heat: str = "heat") -> Compatibility:
    """Compare both sides of ``rule`` on every point of ``{start..bound}^m``.

    ``compatible`` means currents ≥ and heat > everywhere; ``weakly-compatible``
    means both ≥ with equal heat somewhere; otherwise the least failing point
    (lexicographically) is returned as the witness.  With ``heat="structure"``
    the structure heat is used instead of the interpretation's heat.
    """
    lc, lh = _side(rule.lhs, interp, heat)
    rc, rh = _side(rule.rhs, interp, heat)
    weak_at = None
    for point in grid(rule.arity, bound, start):
        a, b = lc(point), rc(point)
        x, y = lh(point), rh(point)
        if any(u < v for u, v in zip(a, b)) or x < y:
            return Compatibility(rule.name, "violation", point, a, b, x, y, bound, start)
        if x == y and weak_at is None:
            weak_at = (point, a, b, x, y)
    if weak_at is not None:
        return Compatibility(rule.name, "weakly-compatible", *weak_at, bound=bound, start=start)
    return Compatibility(rule.name, "compatible", bound=bound, start=start)


def current_preserving(rule: Rule, interp: Interpretation, bound: int = 8, start: int = 1):
    """First grid point where the two sides have different currents, or None."""
    lc, _ = _side(rule.lhs, interp)
    rc, _ = _side(rule.rhs, interp)
    for point in grid(rule.arity, bound, start):
        if lc(point) != rc(point):
            return point
    return None


# ------------------------------------------------------------- simplicity


@dataclass
class SimpleReport:
    simple: bool
    a: int
    K: int
    violations: list
    rules: list
    bound: int
    start: int
    note: str = GRID_NOTE

    def as_dict(self) -> dict:
        return {
            "simple": self.simple, "a": self.a, "K": self.K, "violations": list(self.violations),
            "rules": [r.as_dict() for r in self.rules],
            "grid": {"start": self.start, "bound": self.bound}, "note": self.note,
        }


def check_simple(program: Program, interp: Interpretation, bound: int = 8, start: int = 1) -> SimpleReport:
    """Check the simplicity conditions and compatibility with every computation rule."""
    bad: list[str] = []
    sig = program.signature
    for c in sig.constructors():
        if interp.constants.get(c.name, 0) <= 0:
            bad.append(f"{c.name}: constructor constant must be positive")
    for f in sig.functions():
        ci = interp.functions.get(f.name)
        if ci is None:
            bad.append(f"{f.name}: no interpretation")
            continue
        if len(ci.current) != len(f.target):
            bad.append(f"{f.name}: {len(ci.current)} current maps for {len(f.target)} outputs")
            continue
        used = set().union(ci.heat.variables(), *(e.variables() for e in ci.current))
        if any(v >= len(f.source) for v in used):
            bad.append(f"{f.name}: uses more variables than it has inputs")
            continue
        total = nx.esum(ci.current)
        if not nx.is_polynomial(total):
            bad.append(f"{f.name}: the sum of its currents is not a polynomial")
        if not nx.is_polynomial(ci.heat):
            bad.append(f"{f.name}: its heat is not a polynomial")
        ftot = total.compile()
        for point in grid(len(f.source), bound, start):
            if ftot(point) < sum(point):
                bad.append(f"{f.name}: currents not superadditive at {point}")
                break
    results = []
    if not bad:
        for r in program.rules:
            res = check_compatibility(r, interp, bound, start)
            results.append(res)
            if not res.compatible:
                bad.append(str(res))
    return SimpleReport(not bad, interp.a, program.K, bad, results, bound, start)


# ------------------------------------------------------------ derivations


def _scaled(phi: TwoCell, interp: Interpretation):
    a = interp.a
    return [nx.Const(a) * nx.Var(i) if a != 1 else nx.Var(i) for i in range(len(phi.source))]


def _cell(phi, interp):
    return interp.program.signature.cell(phi) if isinstance(phi, str) else phi


def derive_P(phi, interp: Interpretation) -> NatExpr:
    """Sum of the output currents at ``a·x``."""
    phi = _cell(phi, interp)
    args = _scaled(phi, interp)
    return nx.normalize(nx.esum(e.subst(args) for e in interp.of(phi).current))


def derive_S(phi, interp: Interpretation) -> NatExpr:
    """``K·P²``."""
    p = derive_P(phi, interp)
    return nx.normalize(nx.Const(interp.K) * nx.Pow(p, 2))


def derive_Q(phi, interp: Interpretation) -> NatExpr:
    """The heat at ``a·x``."""
    phi = _cell(phi, interp)
    return nx.normalize(interp.of(phi).heat.subst(_scaled(phi, interp)))


def derive_R(phi, interp: Interpretation) -> NatExpr:
    """``Q·(1 + S)``."""
    return nx.normalize(derive_Q(phi, interp) * (nx.ONE + derive_S(phi, interp)))


# ----------------------------------------------------------------- bounds


@dataclass
class BoundCheck:
    name: str
    measured: int
    bound: int
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured, "bound": self.bound,
                "passed": self.passed, "detail": self.detail}


@dataclass
class BoundReport:
    function: str
    sizes: tuple
    P: NatExpr
    S: NatExpr
    Q: NatExpr
    R: NatExpr
    k: int
    l: int  # noqa: E741
    peak_current_sum: int
    outputs: tuple
    checks: list = field(default_factory=list)
    heat: list = field(default_factory=list)
    simple: bool = True

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def heat_passed(self) -> bool:
        return all(c.passed for c in self.heat)

    def as_dict(self, names=None) -> dict:
        return {
            "function": self.function, "sizes": list(self.sizes),
            "bounds": {k: getattr(self, k).format(names) for k in "PSQR"},
            "k": self.k, "l": self.l, "steps": self.k + self.l,
            "peak_current_sum": self.peak_current_sum, "simple": self.simple,
            "outputs": [str(t) for t in self.outputs],
            "checks": [c.as_dict() for c in self.checks],
            "heat": [c.as_dict() for c in self.heat],
            "passed": self.passed,
        }


def value_layer(d: Diagram, interp: Interpretation) -> int:
    """Σ of the currents leaving the largest closed constructor sub-diagram u
    such that the diagram factors as ``u ⋆₁ c``."""
    vals = {}
    inside = set()
    for n in _order(d):
        nd = d.nodes[n]
        if not nd.cell.is_constructor:
            continue
        ps = d.src[n]
        if all(p >= 0 and p in inside for p, _ in ps):
            inside.add(n)
            args = tuple(vals[p] for p in ps)
            vals[(n, 0)] = interp.compiled(nd.cell)[0](args)[0]
    total = 0
    cons = d.consumers
    for n in inside:
        c = cons[(n, 0)][0]
        if c not in inside:
            total += vals[(n, 0)]
    return total


def _total_heats(d: Diagram, interp: Interpretation) -> tuple[int, int]:
    """(heat, structure heat) of a closed diagram."""
    vals = {}
    heat = sheat = 0
    for n in _order(d):
        nd = d.nodes[n]
        args = tuple(vals[(p, j)] for p, j in d.src[n])
        fns = interp.compiled(nd.cell)
        for j, v in enumerate(fns[0](args)):
            vals[(n, j)] = v
        heat += fns[1](args)
        sheat += fns[2](args)
    return heat, sheat


class _Meter:
    """Heat, structure heat and value layer of a closed working graph, kept
    up to date step by step.

    Per node it keeps the output currents, whether the node belongs to the
    closed constructor part, and what the node adds to each total; the value
    layer is charged to the consumers of that part.  A rewrite only touches
    the removed nodes, the new ones and whatever lies downstream of a
    changed current.
    """

    def __init__(self, interp: Interpretation):
        self.interp = interp
        self.state: dict = {}
        self.heat = self.sheat = self.layer = 0
        self.out_layer = 0
        self.peak = 0
        self.history: list = []
        self.shapes: dict = {}

    def _shape(self, cell: TwoCell):
        if cell.is_constructor:
            got = (0, self.interp.constants[cell.name], None, None)
        elif cell.is_function:
            fns = self.interp.compiled(cell)
            got = (1, 0, fns[0], fns[1])
        else:
            got = ({Kind.TAU: 2, Kind.DELTA: 3, Kind.EPS: 4}[cell.kind], 0, None, None)
        self.shapes[cell.name] = got
        return got

    def _eval(self, r):
        st = self.state
        cell = r[0]
        shape = self.shapes.get(cell.name) or self._shape(cell)
        code = shape[0]
        args = []
        inside = code == 0
        lay = 0
        for n, j in r[2]:
            s = st[n]
            v = s[0][j]
            args.append(v)
            if s[1]:
                lay += v
            else:
                inside = False
        if inside:
            lay = 0
        if code == 0:
            return ((sum(args) + shape[1],), inside, 0, 0, lay)
        if code == 1:
            args = tuple(args)
            return (shape[2](args), False, shape[3](args), 0, lay)
        if code == 2:
            return ((args[1], args[0]), False, 0, args[0] * args[1], lay)
        if code == 3:
            return ((args[0], args[0]), False, 0, args[0] * args[0], lay)
        return ((), False, 0, args[0], lay)

    def _add(self, n, s):
        old = self.state.get(n)
        if old is not None:
            self.heat -= old[2]
            self.sheat -= old[3]
            self.layer -= old[4]
        self.state[n] = s
        self.heat += s[2]
        self.sheat += s[3]
        self.layer += s[4]
        return old

    def _record(self, w, kind):
        st = self.state
        self.out_layer = sum(st[n][0][j] for n, j in w.out_src if st[n][1])
        total = self.layer + self.out_layer
        if total > self.peak:
            self.peak = total
        self.history.append((kind, self.heat, self.sheat))

    def start(self, w) -> None:
        if w.inputs:
            raise ValueError("measurements need a closed diagram")
        self.state.clear()
        self.heat = self.sheat = self.layer = 0
        g = w.g
        for n in _topo(w.freeze()):
            self._add(n, self._eval(g[n]))
        self._record(w, None)

    def step(self, w, m, base: int) -> None:
        g = w.g
        st = self.state
        rule = m.rule
        gone = [n for n in st if n not in g] if rule.has_eps else m.nodes
        dh = dsh = dl = 0
        for n in gone:
            s = st.pop(n)
            dh -= s[2]
            dsh -= s[3]
            dl -= s[4]
        ev = self._eval
        for n in range(base, w.next_id):
            r = g.get(n)
            if r is not None:
                s = st[n] = ev(r)
                dh += s[2]
                dsh += s[3]
                dl += s[4]
        todo = []
        for e in rule.template[2]:
            n, j = (base + e[1], e[2]) if e[0] == "node" else m.wires[e[1]]
            r = g.get(n)
            if r is not None:
                c = r[3][j][0]
                if 0 <= c < base:
                    todo.append(c)
        while todo:
            n = todo.pop()
            r = g[n]
            s = ev(r)
            old = st[n]
            st[n] = s
            dh += s[2] - old[2]
            dsh += s[3] - old[3]
            dl += s[4] - old[4]
            if old[0] != s[0] or old[1] != s[1]:
                todo.extend(c[0] for c in r[3] if c[0] >= 0)
        self.heat += dh
        self.sheat += dsh
        self.layer += dl
        self._record(w, rule.kind_name)


def _derived(phi: TwoCell, interp: Interpretation):
    cache = interp.__dict__.setdefault("_bounds", {})
    got = cache.get(phi.name)
    if got is None:
        got = cache[phi.name] = tuple(f(phi, interp) for f in (derive_P, derive_S, derive_Q, derive_R))
    return got


def term_current(t: Term, interp: Interpretation) -> int:
    """``t_*``: with currents ``Σ x_i + a_γ`` this is the sum of the constants."""
    consts = interp.constants
    total = 0
    stack = [t]
    while stack:
        u = stack.pop()
        total += consts[u.cell.name]
        stack.extend(u.args)
    return total


def verify_bounds(
    program: Program,
    interp: Interpretation,
    phi,
    args: Sequence[Term],
    strategy: str = "innermost",
    fuel: int = DEFAULT_FUEL,
    seed: int | None = None,
    bound: int = 8,
    require_simple: bool = True,
    simple_report: SimpleReport | None = None,
) -> BoundReport:
    """Run ``phi`` on ``args`` and compare measurements with the bounds.

    Checks: (1) ‖t‖ ≤ t_* ≤ a‖t‖ for every argument and result, (2) the
    value layer of every intermediate diagram stays below ``P``, (3) k ≤ Q,
    (4) l ≤ Q·S, (5) k + l ≤ R.  Heat behaviour along the trace is reported
    separately.  Raises :class:`NotSimple` unless the interpretation passes
    :func:`check_simple` (skip with ``require_simple=False``).
    """
    phi = _cell(phi, interp)
    if simple_report is None and require_simple:
        simple_report = check_simple(program, interp, bound)
    if require_simple and not simple_report.simple:
        raise NotSimple(simple_report)
    a = interp.a
    sizes = tuple(t.size() for t in args)
    P, S, Q, R = _derived(phi, interp)
    p_b, s_b, q_b, r_b = (e.eval(sizes) for e in (P, S, Q, R))

    meter = _Meter(interp)
    d = initial_diagram(phi, args)
    final, trace = normalize(d, program, strategy=strategy, fuel=fuel, seed=seed, meter=meter)
    peak, history = meter.peak, meter.history
    trace.peak_current_sum = peak
    outputs = decode_values(final)
    k, l = trace.k, trace.l

    checks = []
    worst = None
    for t in tuple(args) + tuple(outputs):
        cur = term_current(t, interp)
        size = t.size()
        if not size <= cur <= a * size and worst is None:
            worst = (t, size, cur)
    checks.append(BoundCheck(
        "size-values", 0 if worst is None else 1, 0, worst is None,
        "" if worst is None else f"‖t‖={worst[1]}, t_*={worst[2]}, a={a} for {worst[0]}",
    ))
    checks.append(BoundCheck("P", peak, p_b, peak <= p_b, "largest value layer vs P(sizes)"))
    checks.append(BoundCheck("Q", k, q_b, k <= q_b, "computation steps vs Q(sizes)"))
    checks.append(BoundCheck("QS", l, q_b * s_b, l <= q_b * s_b, "structure steps vs Q·S(sizes)"))
    checks.append(BoundCheck("R", k + l, r_b, k + l <= r_b, "all steps vs R(sizes)"))

    heat = heat_checks(history)
    return BoundReport(phi.name, sizes, P, S, Q, R, k, l, peak, outputs, checks, heat,
                       simple_report.simple if simple_report is not None else False)


def heat_checks(history) -> list[BoundCheck]:
    """Heat along a run: strict decrease on computation steps, no increase on
    structure steps, strict structure-heat decrease on structure steps."""
    bad_c = bad_s = bad_ss = 0
    first = {}
    for i in range(1, len(history)):
        kind, h, sh = history[i]
        _, h0, sh0 = history[i - 1]
        if kind == "computation" and not h < h0:
            bad_c += 1
            first.setdefault("c", (i, h0, h))
        if kind == "structure":
            if h > h0:
                bad_s += 1
                first.setdefault("s", (i, h0, h))
            if not sh < sh0:
                bad_ss += 1
                first.setdefault("ss", (i, sh0, sh))

    def detail(key):
        if key not in first:
            return ""
        i, before, after = first[key]
        return f"first at step {i}: {before} -> {after}"

    return [
        BoundCheck("heat-computation", bad_c, 0, bad_c == 0, detail("c")),
        BoundCheck("heat-structure", bad_s, 0, bad_s == 0, detail("s")),
        BoundCheck("structure-heat", bad_ss, 0, bad_ss == 0, detail("ss")),
    ]


def value_diagram_of(t: Term) -> Diagram:
    from .core import value_diagram

    return value_diagram([t])


def heat_history(program: Program, interp: Interpretation, phi, args: Sequence[Term],
                 strategy: str = "innermost", fuel: int = DEFAULT_FUEL):
    """(kind, heat, structure heat) after every step of a run."""
    phi = _cell(phi, interp)
    history = []

    def observe(d, m):
        history.append((m.rule.kind.value if m is not None else None, *_total_heats(d, interp)))

    normalize(initial_diagram(phi, args), program, strategy=strategy, fuel=fuel, observer=observe)
    return history


def check_structure_rules(rules: Iterable[Rule], interp: Interpretation, bound: int = 8, start: int = 1):
    """For each structure rule: (rule, current-preservation witness or None,
    compatibility under the heat, compatibility under the structure heat)."""
    out = []
    for r in rules:
        out.append((r, current_preserving(r, interp, bound, start),
                    check_compatibility(r, interp, bound, start),
                    check_compatibility(r, interp, bound, start, heat="structure")))
    return out
