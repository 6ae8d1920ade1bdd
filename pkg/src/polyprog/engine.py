"""Matching, rewriting, normalization and the two evaluation semantics."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .core import (
    IN, OUT, Diagram, Kind, Node, NotAValue, Term, TwoCell, TypeMismatch,
    boundary_numbering, canonical_form, decode_values,
)
from .rules import Program, Rule, RuleKind

DEFAULT_FUEL = 1_000_000
DEFAULT_STATES = 1_000_000
DEFAULT_DEPTH = 10_000

STRATEGIES = ("innermost", "outermost", "random")


class StaleMatch(ValueError):
    pass


class FuelExhausted(RuntimeError):
    def __init__(self, trace: "Trace"):
        super().__init__(f"fuel exhausted after {len(trace.steps)} steps")
        self.trace = trace


class BudgetExhausted(RuntimeError):
    def __init__(self, partial: set, reason: str):
        super().__init__(f"exploration budget exhausted ({reason}); {len(partial)} normal forms so far")
        self.partial = partial
        self.reason = reason


class Match(NamedTuple):
    """A redex: ``rule`` anchored at node ``anchor``.

    ``wires`` are the host ports bound to the rule inputs, ``literals`` the
    bound literal variables and ``nodes`` the host nodes covered by the
    left-hand side (anchor first).
    """

    rule: Rule
    anchor: int
    wires: tuple
    literals: tuple
    nodes: tuple

    def binding(self) -> dict:
        return dict(self.literals)

    def __str__(self):
        lits = ", ".join(f"{k}={v}" for k, v in self.literals)
        return f"{self.rule.name}@{self.anchor}" + (f" [{lits}]" if lits else "")


class Step(NamedTuple):
    rule: str
    kind: str
    anchor: int


@dataclass
class Trace:
    initial: Diagram
    steps: list = field(default_factory=list)
    final: Diagram | None = None
    peak_current_sum: int | None = None

    @property
    def k(self) -> int:
        return sum(1 for s in self.steps if s.kind == "computation")

    @property
    def l(self) -> int:  # noqa: E743
        return sum(1 for s in self.steps if s.kind == "structure")

    def __len__(self):
        return len(self.steps)


# ------------------------------------------------------------ compiled rules
#
# The working graph maps node ids to records [cell, literal, src, dst, done]
# where src/dst list the ports feeding the node and the ports it feeds, and
# done marks nodes with no redex anywhere below them.  Each rule is compiled
# once into a matcher and a builder working directly on these records.

CELL, LIT, SRC, DST, DONE = range(5)

_OPS = {"=": "=="}


def _operand(x, names):
    return names[x] if isinstance(x, str) else repr(x)


def _match_body(rule: Rule, tag: str, fail: str, pad: str) -> list[str]:
    """Statements matching ``rule`` at node ``a``; ``fail`` leaves on mismatch."""
    lines = [f"{pad}s0 = g[a][2]"]
    wires: dict[int, str] = {}
    nodes = ["a"]
    lits: dict[str, str] = {}
    count = 0

    def emit(pat, port):
        nonlocal count
        if len(pat) == 1:
            wires[pat[0]] = port
            return
        count += 1
        k = count
        lines.append(f"{pad}n{k} = {port}[0]")
        lines.append(f"{pad}if n{k} < 0: {fail}")
        lines.append(f"{pad}r{k} = g[n{k}]")
        lines.append(f"{pad}if r{k}[0].name != {pat.cell.name!r}: {fail}")
        lit = pat.literal
        if isinstance(lit, str):
            if lit in lits:
                lines.append(f"{pad}if r{k}[1] != {lits[lit]}: {fail}")
            else:
                lits[lit] = f"L{len(lits)}"
                lines.append(f"{pad}{lits[lit]} = r{k}[1]")
        elif lit is not None:
            lines.append(f"{pad}if r{k}[1] != {lit!r}: {fail}")
        nodes.append(f"n{k}")
        if pat.children:
            lines.append(f"{pad}s{k} = r{k}[2]")
            for i, ch in enumerate(pat.children):
                emit(ch, f"s{k}[{i}]")

    for i, pat in enumerate(rule.patterns):
        emit(pat, f"s0[{i}]")
    for g in rule.guard:
        op = _OPS.get(g.op, g.op)
        lines.append(f"{pad}if not ({_operand(g.left, lits)} {op} {_operand(g.right, lits)}): {fail}")
    ws = "".join(f"{wires[i]}, " for i in range(rule.arity))
    ls = "".join(f"({k!r}, {lits[k]}), " for k in sorted(lits))
    lines.append(f"{pad}return Match({tag}, a, ({ws}), ({ls}), ({', '.join(nodes)},))")
    return lines


def _compile_matcher(rule: Rule):
    lines = ["def match(a, g):"] + _match_body(rule, "R", "return None", "    ")
    env = {"Match": Match, "R": rule}
    exec(compile("\n".join(lines), f"<match {rule.name}>", "exec"), env)  # noqa: S102
    return env["match"]


def _compile_first(rules: Sequence[Rule], label: str):
    """One function returning the match of the first rule that applies."""
    lines = ["def first(a, g):"]
    env = {"Match": Match}
    for i, rule in enumerate(rules):
        env[f"R{i}"] = rule
        lines.append("    while True:")
        lines += _match_body(rule, f"R{i}", "break", "        ")
    lines.append("    return None")
    exec(compile("\n".join(lines), f"<first {label}>", "exec"), env)  # noqa: S102
    return env["first"]


def _count_nodes(pat) -> int:
    return 0 if len(pat) == 1 else 1 + sum(_count_nodes(c) for c in pat.children)


def _compile_builder(rule: Rule):
    """``build(w, m, base)`` instantiates the right-hand side of ``rule``."""
    tnodes, tsrcs, touts = rule.template
    covered = 1 + sum(_count_nodes(p) for p in rule.patterns)
    lines = [
        "def build(w, m, b):",
        "    g = w.g",
        "    outs = g[m.anchor][3]",
        "    N = m.nodes",
        "    del " + ", ".join(f"g[N[{i}]]" for i in range(covered)),
        "    W = m.wires",
    ]
    if not rule.anchor_cell.target:
        lines.append("    w.sinks.discard(m.anchor)")
    names = sorted({nd.literal for nd in tnodes if isinstance(nd.literal, str)})
    if names:
        lines.append("    L = m.literals")

    def producer(e):
        return f"W[{e[1]}]" if e[0] == "in" else f"(b + {e[1]}, {e[2]})"

    consumer = {}
    for k, entries in enumerate(tsrcs):
        for i, e in enumerate(entries):
            consumer[e[1:] if e[0] == "node" else ("in", e[1], k, i)] = f"(b + {k}, {i})"
    for j, e in enumerate(touts):
        if e[0] == "node":
            consumer[e[1:]] = f"outs[{j}]"

    env = {}
    done: dict[int, str] = {}
    for k, nd in enumerate(tnodes):
        env[f"C{k}"] = nd.cell
        lit = f"L[{names.index(nd.literal)}][1]" if isinstance(nd.literal, str) else repr(nd.literal)
        srcs = ", ".join(producer(e) for e in tsrcs[k])
        dsts = ", ".join(consumer[(k, j)] for j in range(len(nd.cell.target)))
        # a constructor over finished inputs has no redex below it
        flag = "False"
        if nd.cell.is_constructor:
            conds = []
            for e in tsrcs[k]:
                if e[0] == "in":
                    conds.append(f"(W[{e[1]}][0] < 0 or g[W[{e[1]}][0]][4])")
                elif done.get(e[1], "False") == "False":
                    conds = None
                    break
                else:
                    conds.append(f"r{e[1]}[4]")
            if conds is not None:
                flag = " and ".join(conds) if conds else "True"
        done[k] = flag
        lines.append(f"    r{k} = g[b + {k}] = [C{k}, {lit}, [{srcs}], [{dsts}], {flag}]")
        if not nd.cell.target:
            lines.append(f"    w.sinks.add(b + {k})")

    def link(wire, cons):
        lines.append(f"    p = W[{wire}]")
        lines.append(f"    if p[0] >= 0: g[p[0]][3][p[1]] = {cons}")
        lines.append(f"    else: w.in_dst[p[1]] = {cons}")

    for k, entries in enumerate(tsrcs):
        for i, e in enumerate(entries):
            if e[0] == "in":
                link(e[1], f"(b + {k}, {i})")
    for j, e in enumerate(touts):
        lines.append(f"    c = outs[{j}]")
        lines.append(f"    if c[0] >= 0: g[c[0]][2][c[1]] = {producer(e)}")
        lines.append(f"    else: w.out_src[c[1]] = {producer(e)}")
        if e[0] == "in":
            link(e[1], "c")
    lines.append("    return outs")
    exec(compile("\n".join(lines), f"<build {rule.name}>", "exec"), env)  # noqa: S102
    return env["build"]


def _compiled(rule: Rule):
    got = rule.__dict__.get("_compiled")
    if got is None:
        got = rule._compiled = (_compile_matcher(rule), _compile_builder(rule))
        rule._build = got[1]
        rule._size = len(rule.template[0])
    return got


def _matcher(rule: Rule):
    return _compiled(rule)[0]


# ------------------------------------------------------------------ matching


def _rules_table(program: Program):
    """Per cell name, the compiled matchers of the rules anchored there."""
    table = program.__dict__.get("_matchers")
    if table is None:
        table = program.__dict__["_matchers"] = {}
    return table


def _matchers_for(program: Program, cell: TwoCell, table):
    """(first-match function or None, per-rule matchers) for ``cell``."""
    got = table.get(cell.name)
    if got is None:
        rules = () if cell.is_constructor else program.rules_for(cell)
        for r in rules:
            _compiled(r)
        first = _compile_first(rules, cell.name) if rules else None
        got = table[cell.name] = (first, tuple(_matcher(r) for r in rules))
    return got


class _Work:
    """Mutable copy of a diagram used while rewriting."""

    def __init__(self, d: Diagram, program: Program | None = None):
        self.program = program
        self.table = _rules_table(program) if program is not None else None
        self.inputs = d.inputs
        self.outputs = d.outputs
        g = self.g = {}
        for n, nd in d.nodes.items():
            g[n] = [nd.cell, nd.literal, list(d.src[n]), [None] * len(nd.cell.target), False]
        self.in_dst = [None] * len(d.inputs)
        self.out_src = list(d.out_src)
        for n, r in g.items():
            for i, p in enumerate(r[SRC]):
                self._set_dst(p, (n, i))
        for j, p in enumerate(self.out_src):
            self._set_dst(p, (OUT, j))
        self.sinks = {n for n, r in g.items() if not r[CELL].target}
        self.next_id = max(g, default=-1) + 1
        # resumable leftmost-innermost search
        self.stack: list = []
        self.root = 0

    @classmethod
    def applied(cls, program: Program, phi: TwoCell, args: Sequence[Term]) -> "_Work":
        """Working graph of ``(args) ⋆₁ phi`` built straight from the terms;
        node ids agree with :func:`initial_diagram`."""
        w = cls.__new__(cls)
        w.program = program
        w.table = _rules_table(program)
        w.inputs, w.outputs = (), phi.target
        g = w.g = {}
        tops = []
        for t in args:
            stack = [(t, False)]
            done: list = []
            while stack:
                u, expanded = stack.pop()
                k = len(u.args)
                if k and not expanded:
                    stack.append((u, True))
                    stack.extend((a, False) for a in reversed(u.args))
                    continue
                n = len(g)
                if k:
                    kids = done[-k:]
                    del done[-k:]
                    for j, c in enumerate(kids):
                        g[c][DST][0] = (n, j)
                    g[n] = [u.cell, u.literal, [(c, 0) for c in kids], [None], True]
                else:
                    g[n] = [u.cell, u.literal, [], [None], True]
                done.append(n)
            tops.append(done[0])
        f = len(g)
        for j, c in enumerate(tops):
            g[c][DST][0] = (f, j)
        g[f] = [phi, None, [(c, 0) for c in tops], [(OUT, j) for j in range(len(phi.target))], False]
        w.in_dst = []
        w.out_src = [(f, j) for j in range(len(phi.target))]
        w.sinks = {f} if not phi.target else set()
        w.next_id = f + 1
        w.stack = []
        w.root = 0
        return w

    def values(self) -> tuple[Term, ...]:
        """Decode the outputs, which must be closed constructor trees."""
        g = self.g
        memo: dict = {}
        for p in self.out_src:
            if p[0] < 0:
                raise NotAValue("output wired to the input boundary", self.freeze())
            stack = [p[0]]
            while stack:
                n = stack[-1]
                if n in memo:
                    stack.pop()
                    continue
                r = g[n]
                if r[CELL].kind is not Kind.CONSTRUCTOR:
                    raise NotAValue(f"normal form contains the non-constructor cell {r[CELL].name}",
                                    self.freeze())
                todo = [q[0] for q in r[SRC] if q[0] not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                stack.pop()
                memo[n] = Term(r[CELL], r[LIT], tuple(memo[q[0]] for q in r[SRC]))
        if len(memo) != len(g):
            stray = next(r for n, r in g.items() if n not in memo)
            raise NotAValue(f"normal form contains a disconnected {stray[CELL].name}", self.freeze())
        return tuple(memo[p[0]] for p in self.out_src)

    def _set_dst(self, p, c):
        if p[0] == IN:
            self.in_dst[p[1]] = c
        else:
            self.g[p[0]][DST][p[1]] = c

    def freeze(self) -> Diagram:
        g = self.g
        nodes = {n: Node(r[CELL], r[LIT]) for n, r in g.items()}
        src = {n: r[SRC] for n, r in g.items()}
        return Diagram(self.inputs, self.outputs, nodes, src, self.out_src)

    def matches_at(self, n: int, first: bool):
        r = self.g[n]
        if r[CELL].kind is Kind.CONSTRUCTOR:
            return []
        out = []
        for f in _matchers_for(self.program, r[CELL], self.table)[1]:
            m = f(n, self.g)
            if m is not None:
                if first:
                    return [m]
                out.append(m)
        return out

    # --------------------------------------------------------------- rewrite

    def apply(self, m: Match) -> None:
        rule = m.rule
        base = self.next_id
        self.next_id += len(rule.template[0])
        _compiled(rule)[1](self, m, base)
        if rule.has_eps:
            self._erase(rule, base)

    def _erase(self, rule: Rule, base: int) -> None:
        for k, nd in enumerate(rule.template[0]):
            if nd.cell.kind is Kind.EPS and base + k in self.g:
                self._collect(base + k)

    def _collect(self, start: int) -> None:
        """Delete the component of ``start`` if it touches no boundary."""
        g = self.g
        seen = {start}
        stack = [start]
        while stack:
            r = g[stack.pop()]
            for p in r[SRC]:
                if p[0] == IN:
                    return
                if p[0] not in seen:
                    seen.add(p[0])
                    stack.append(p[0])
            for c in r[DST]:
                if c[0] == OUT:
                    return
                if c[0] not in seen:
                    seen.add(c[0])
                    stack.append(c[0])
        for n in seen:
            del g[n]
            self.sinks.discard(n)

    # ------------------------------------------------------------ traversals

    def innermost(self) -> Match | None:
        """Leftmost-innermost redex: the first node, in post-order from the
        outputs (left to right), that is a redex.  The search resumes where
        the previous one stopped; the nodes it has already left behind have
        no redex below them and are not affected by a rewrite elsewhere.
        Erasures left hanging once the outputs are normal are reduced in
        creation order."""
        out_src = self.out_src
        g = self.g
        while self.root < len(out_src):
            if not self.stack:
                p = out_src[self.root][0]
                if p < 0 or g[p][DONE]:
                    self.root += 1
                    continue
                self.stack.append([p, 0])
            m = self._descend(self.stack)
            if m is not None:
                return m
        return self._late()

    def _late(self) -> Match | None:
        g = self.g
        for n in sorted(self.sinks):
            if not g[n][DONE]:
                m = self._descend([[n, 0]])
                if m is not None:
                    return m
        return None

    def run_innermost(self, steps: list, fuel: int, meter=None) -> bool:
        """Normalize in place with the leftmost-innermost strategy, appending
        to ``steps``; False when the fuel runs out first.  Same choices as
        repeated :meth:`innermost` calls, without the per-step overhead.
        ``meter.step`` is called after every rewrite."""
        g, table, out_src = self.g, self.table, self.out_src
        ns: list = []  # path from the current root
        ix: list = []  # next input to look at, per path entry
        push_n, push_i, pop_n, pop_i = ns.append, ix.append, ns.pop, ix.pop
        record = steps.append
        root = 0
        m = None
        # records are [cell, literal, src, dst, done]; indices are inlined here
        while True:
            if not ns:
                if root < len(out_src):
                    p = out_src[root][0]
                    if p < 0 or g[p][4]:
                        root += 1
                    else:
                        push_n(p)
                        push_i(0)
                    continue
                m = self._late()
                if m is None:
                    return True
            else:
                n = ns[-1]
                r = g[n]
                ps = r[2]
                i = ix[-1]
                k = len(ps)
                while i < k:
                    p = ps[i][0]
                    i += 1
                    if p >= 0 and not g[p][4]:
                        ix[-1] = i
                        push_n(p)
                        push_i(0)
                        break
                else:
                    pop_n()
                    pop_i()
                    fm = table.get(r[0].name)
                    if fm is None:
                        fm = _matchers_for(self.program, r[0], table)
                    if fm[0] is None or (m := fm[0](n, g)) is None:
                        r[4] = True
                        continue
                    if ix:
                        # the consumer's input now comes from the right-hand side
                        ix[-1] -= 1
                if m is None:
                    continue
            if len(steps) >= fuel:
                return False
            rule = m.rule
            base = self.next_id
            self.next_id = base + rule._size
            rule._build(self, m, base)
            if rule.has_eps:
                self._erase(rule, base)
            record(Step(rule.name, rule.kind_name, m.anchor))
            if meter is not None:
                meter.step(self, m, base)
            m = None

    def _descend(self, stack):
        # no visited set is needed: the graph is acyclic and finished nodes are DONE
        g = self.g
        table = self.table
        while stack:
            top = stack[-1]
            r = g[top[0]]
            ps = r[SRC]
            i = top[1]
            k = len(ps)
            while i < k:
                p = ps[i][0]
                i += 1
                if p >= 0 and not g[p][DONE]:
                    top[1] = i
                    stack.append([p, 0])
                    break
            else:
                stack.pop()
                first = _matchers_for(self.program, r[CELL], table)[0]
                m = first(top[0], g) if first is not None else None
                if m is not None:
                    if stack:
                        stack[-1][1] -= 1
                    return m
                r[DONE] = True
        return None

    def all_matches(self) -> list[Match]:
        acc: list = []
        g = self.g
        seen = set()
        for root in self._roots_then_sinks():
            if root in seen or g[root][DONE]:
                continue
            stack = [[root, 0]]
            seen.add(root)
            while stack:
                top = stack[-1]
                n = top[0]
                ps = g[n][SRC]
                pushed = False
                while top[1] < len(ps):
                    p = ps[top[1]][0]
                    top[1] += 1
                    if p >= 0 and p not in seen and not g[p][DONE]:
                        seen.add(p)
                        stack.append([p, 0])
                        pushed = True
                        break
                if pushed:
                    continue
                stack.pop()
                ms = self.matches_at(n, False)
                if ms:
                    acc.extend(ms)
                elif all(p[0] < 0 or g[p[0]][DONE] for p in ps):
                    g[n][DONE] = True
        return acc

    def _roots_then_sinks(self):
        roots = [p[0] for p in self.out_src if p[0] >= 0]
        reached = self._reached()
        late = [n for n in self.sinks if n not in reached]
        if late:
            numbering = boundary_numbering(self.freeze())
            late.sort(key=lambda n: (numbering.get(n, len(numbering)), n))
        return roots + late

    def _reached(self) -> set:
        g = self.g
        stack = [p[0] for p in self.out_src if p[0] >= 0]
        seen = set(stack)
        while stack:
            for p in g[stack.pop()][SRC]:
                if p[0] >= 0 and p[0] not in seen:
                    seen.add(p[0])
                    stack.append(p[0])
        return seen

    def outermost(self) -> Match | None:
        g = self.g
        seen = set()
        for root in self._roots_then_sinks():
            stack = [root]
            while stack:
                n = stack.pop()
                if n in seen:
                    continue
                seen.add(n)
                ms = self.matches_at(n, True)
                if ms:
                    return ms[0]
                stack.extend(p[0] for p in reversed(g[n][SRC]) if p[0] >= 0)
        return None


# ---------------------------------------------------------------- public API


def collect_garbage(d: Diagram) -> Diagram:
    """Drop every erasure whose component touches neither boundary, together
    with that component, as rewriting does after each step."""
    w = _Work(d)
    for n, r in list(w.g.items()):
        if r[CELL].kind is Kind.EPS and n in w.g:
            w._collect(n)
    return w.freeze()


def find_redexes(d: Diagram, program: Program) -> list[Match]:
    """Every redex of ``d``, in canonical post-order of their anchors."""
    return _Work(d, program).all_matches()


def apply(d: Diagram, m: Match) -> Diagram:
    """Rewrite the redex ``m`` of ``d``."""
    if m.anchor not in d.nodes:
        raise StaleMatch(f"anchor {m.anchor} is not in the diagram")
    w = _Work(d)
    if _matcher(m.rule)(m.anchor, w.g) != m:
        raise StaleMatch(f"{m.rule.name} no longer matches at {m.anchor}")
    w.apply(m)
    return w.freeze()


def normalize(
    d: Diagram,
    program: Program,
    strategy: str = "innermost",
    fuel: int = DEFAULT_FUEL,
    seed: int | None = None,
    observer: Callable[[Diagram, Match | None], None] | None = None,
    meter=None,
) -> tuple[Diagram, Trace]:
    """Rewrite until no redex is left.

    ``strategy`` is ``innermost`` (leftmost-innermost, the default),
    ``outermost`` (leftmost-outermost) or ``random`` (seeded by ``seed``).
    ``observer`` is called with the initial diagram and after every step.
    ``meter`` is the cheaper variant that works on the live graph: its
    ``start(w)`` sees the initial working graph and ``step(w, m, base)``
    every rewrite, ``base`` being the first id given to the new nodes.
    """
    if strategy.startswith("random"):
        if ":" in strategy:
            seed = int(strategy.split(":", 1)[1])
        strategy = "random"
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    w = _Work(d, program)
    trace = Trace(initial=d)
    steps = trace.steps
    if observer is not None:
        observer(d, None)
    if meter is not None:
        meter.start(w)
    if observer is None and strategy == "innermost":
        if not w.run_innermost(steps, fuel, meter):
            trace.final = w.freeze()
            raise FuelExhausted(trace)
        trace.final = w.freeze()
        return trace.final, trace
    rng = random.Random(seed)
    while True:
        if strategy == "innermost":
            m = w.innermost()
        elif strategy == "outermost":
            m = w.outermost()
        else:
            ms = w.all_matches()
            m = rng.choice(ms) if ms else None
        if m is None:
            break
        if len(steps) >= fuel:
            trace.final = w.freeze()
            raise FuelExhausted(trace)
        base = w.next_id
        w.apply(m)
        steps.append(Step(m.rule.name, m.rule.kind_name, m.anchor))
        if meter is not None:
            meter.step(w, m, base)
        if observer is not None:
            observer(w.freeze(), m)
    trace.final = w.freeze()
    return trace.final, trace


def successors(d: Diagram, program: Program) -> list[Diagram]:
    return [apply(d, m) for m in find_redexes(d, program)]


def enumerate_normal_forms(
    d: Diagram,
    program: Program,
    max_states: int = DEFAULT_STATES,
    max_depth: int = DEFAULT_DEPTH,
) -> set[Diagram]:
    """Breadth-first search of the reduction graph, memoized on canonical form."""
    seen = {canonical_form(d)}
    queue = deque([(d, 0)])
    normal: set = set()
    while queue:
        cur, depth = queue.popleft()
        w = _Work(cur, program)
        ms = w.all_matches()
        if not ms:
            normal.add(cur)
            continue
        if depth >= max_depth:
            raise BudgetExhausted(normal, "depth")
        for m in ms:
            nxt = apply(cur, m)
            key = canonical_form(nxt)
            if key in seen:
                continue
            if len(seen) >= max_states:
                raise BudgetExhausted(normal, "states")
            seen.add(key)
            queue.append((nxt, depth + 1))
    return normal


# -------------------------------------------------------------------- values


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def _term_order(sig, t: Term, u: Term) -> int:
    c = _cmp(t.size(), u.size())
    if c:
        return c
    return _structural(sig, t, u)


def _structural(sig, t: Term, u: Term) -> int:
    if t.cell != u.cell:
        if sig is not None:
            return _cmp(sig.declaration_index(t.cell), sig.declaration_index(u.cell))
        return _cmp(t.cell.name, u.cell.name)
    c = _cmp(t.literal or 0, u.literal or 0)
    if c:
        return c
    for a, b in zip(t.args, u.args):
        c = _term_order(sig, a, b)
        if c:
            return c
    return 0


def value_order(t, u, sig=None) -> str:
    """``less``, ``equal`` or ``greater``: size first, then the root
    constructor, then the children from left to right.  Tuples of values
    are compared lexicographically."""
    ts = t if isinstance(t, tuple) and not isinstance(t, Term) else (t,)
    us = u if isinstance(u, tuple) and not isinstance(u, Term) else (u,)
    if len(ts) != len(us):
        raise TypeMismatch(min(len(ts), len(us)), len(us), len(ts))
    for i, (a, b) in enumerate(zip(ts, us)):
        if a.cell.target != b.cell.target:
            raise TypeMismatch(i, b.cell.target[0], a.cell.target[0])
        c = _term_order(sig, a, b)
        if c:
            return "less" if c < 0 else "greater"
    return "equal"


def value_max(values, sig=None):
    best = None
    for v in values:
        if best is None or value_order(v, best, sig) == "greater":
            best = v
    return best


def _check_args(phi: TwoCell, args: Sequence[Term]) -> None:
    got = tuple(t.cell.target[0] for t in args)
    if got != phi.source:
        pos = next((i for i, (a, b) in enumerate(zip(got, phi.source)) if a != b),
                   min(len(got), len(phi.source)))
        raise TypeMismatch(pos, phi.source[pos] if pos < len(phi.source) else None,
                           got[pos] if pos < len(got) else None)


def initial_diagram(phi: TwoCell, args: Sequence[Term]) -> Diagram:
    """``(t1 ⋆₀ ... ⋆₀ tm) ⋆₁ phi``."""
    _check_args(phi, args)
    nodes: dict = {}
    src: dict = {}
    tops = []
    for t in args:
        stack = [(t, False)]
        done = []
        while stack:
            u, expanded = stack.pop()
            if not expanded and u.args:
                stack.append((u, True))
                stack.extend((a, False) for a in reversed(u.args))
                continue
            n = len(nodes)
            kids = done[len(done) - len(u.args):] if u.args else []
            if u.args:
                del done[len(done) - len(u.args):]
            nodes[n] = Node(u.cell, u.literal)
            src[n] = [(k, 0) for k in kids]
            done.append(n)
        tops.append(done[0])
    f = len(nodes)
    nodes[f] = Node(phi)
    src[f] = [(n, 0) for n in tops]
    return Diagram((), phi.target, nodes, src, [(f, j) for j in range(len(phi.target))])


def evaluate(
    program: Program,
    phi: TwoCell | str,
    args: Sequence[Term],
    mode: str = "confluent",
    fuel: int = DEFAULT_FUEL,
    strategy: str = "innermost",
    seed: int | None = None,
    max_states: int = DEFAULT_STATES,
    max_depth: int = DEFAULT_DEPTH,
) -> tuple[Term, ...]:
    """Values computed by ``phi`` on ``args``.

    In ``confluent`` mode the initial diagram is normalized once; in
    ``exhaustive`` mode every normal form is enumerated and the largest
    under :func:`value_order` is returned.
    """
    if isinstance(phi, str):
        phi = program.signature.cell(phi)
    if mode == "confluent" and strategy == "innermost":
        _check_args(phi, args)
        w = _Work.applied(program, phi, args)
        steps: list = []
        if not w.run_innermost(steps, fuel):
            raise FuelExhausted(Trace(initial_diagram(phi, args), steps, w.freeze()))
        return w.values()
    d = initial_diagram(phi, args)
    if mode == "confluent":
        final, _ = normalize(d, program, strategy=strategy, fuel=fuel, seed=seed)
        return decode_values(final)
    if mode == "exhaustive":
        forms = enumerate_normal_forms(d, program, max_states, max_depth)
        return value_max((decode_values(f) for f in forms), program.signature)
    raise ValueError(f"unknown mode {mode!r}")


__all__ = [
    "BudgetExhausted", "FuelExhausted", "Match", "NotAValue", "StaleMatch", "Step", "Trace",
    "apply", "collect_garbage", "enumerate_normal_forms", "evaluate", "find_redexes", "initial_diagram",
    "normalize", "value_max", "value_order", "RuleKind",
]
