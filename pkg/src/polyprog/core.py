"""Signatures, 2-cells and diagrams (2-paths) stored as port graphs.

A diagram is a directed acyclic port graph.  Every node is an instance of a
2-cell; each of its input ports is fed by exactly one producer port, which is
either an output port of another node or one of the diagram inputs.  Ports
are pairs ``(node, index)`` and the diagram boundary uses the pseudo-node ids
``IN`` and ``OUT``.  Because the graph itself is the 2-path, diagrams that
differ only by a topological deformation are literally the same graph, up to
renaming of node ids; :func:`canonical_form` removes that last freedom.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

IN = -1
OUT = -2

Port = tuple  # (node id or IN, port index)


class Kind(Enum):
    CONSTRUCTOR = "constructor"
    FUNCTION = "function"
    TAU = "tau"
    DELTA = "delta"
    EPS = "eps"


STRUCTURE_KINDS = frozenset({Kind.TAU, Kind.DELTA, Kind.EPS})


class TypeMismatch(TypeError):
    """Raised when two boundaries that must agree do not."""

    def __init__(self, position: int, expected, found):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(
            f"type mismatch at position {position}: expected {expected}, found {found}"
        )


class SignatureError(ValueError):
    pass


class NotAValue(ValueError):
    """A normal form still contains function or structure cells."""

    def __init__(self, message: str, diagram=None):
        super().__init__(message)
        self.diagram = diagram


@dataclass(frozen=True)
class TwoCell:
    name: str
    source: tuple
    target: tuple
    kind: Kind
    literal_family: bool = False

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        if self.kind is Kind.CONSTRUCTOR and len(self.target) != 1:
            raise SignatureError(f"constructor {self.name} must have exactly one output")
        if self.literal_family and (self.kind is not Kind.CONSTRUCTOR or self.source):
            raise SignatureError(f"literal family {self.name} must be a nullary constructor")
        if self.kind is Kind.TAU:
            ok = len(self.source) == 2 and self.target == self.source[::-1]
        elif self.kind is Kind.DELTA:
            ok = len(self.source) == 1 and self.target == self.source * 2
        elif self.kind is Kind.EPS:
            ok = len(self.source) == 1 and not self.target
        else:
            ok = True
        if not ok:
            raise SignatureError(f"structure cell {self.name} has the wrong shape")

    @property
    def is_constructor(self) -> bool:
        return self.kind is Kind.CONSTRUCTOR

    @property
    def is_function(self) -> bool:
        return self.kind is Kind.FUNCTION

    @property
    def is_structure(self) -> bool:
        return self.kind in STRUCTURE_KINDS

    def __repr__(self):
        return f"<{self.kind.value} {self.name}>"


@lru_cache(maxsize=None)
def tau_cell(xi: str, zeta: str) -> TwoCell:
    return TwoCell(f"tau[{xi},{zeta}]", (xi, zeta), (zeta, xi), Kind.TAU)


@lru_cache(maxsize=None)
def delta_cell(xi: str) -> TwoCell:
    return TwoCell(f"delta[{xi}]", (xi,), (xi, xi), Kind.DELTA)


@lru_cache(maxsize=None)
def eps_cell(xi: str) -> TwoCell:
    return TwoCell(f"eps[{xi}]", (xi,), (), Kind.EPS)


class Signature:
    """Sorts plus the constructor and function 2-cells, in declaration order.

    Structure cells are not stored; they exist implicitly for every sort and
    are obtained with :meth:`tau`, :meth:`delta` and :meth:`eps`.
    """

    def __init__(self, sorts: Iterable[str], cells: Iterable[TwoCell]):
        self.sorts = tuple(sorts)
        if len(set(self.sorts)) != len(self.sorts):
            raise SignatureError("sort names must be unique")
        known = set(self.sorts)
        self.cells: dict[str, TwoCell] = {}
        for c in cells:
            if c.is_structure:
                raise SignatureError(f"{c.name}: structure cells are implicit")
            if c.name in self.cells or c.name in known:
                raise SignatureError(f"duplicate name {c.name}")
            for s in c.source + c.target:
                if s not in known:
                    raise SignatureError(f"{c.name}: unknown sort {s}")
            self.cells[c.name] = c
        self._index = {name: i for i, name in enumerate(self.cells)}

    def __repr__(self):
        return f"Signature(sorts={list(self.sorts)}, cells={list(self.cells)})"

    def cell(self, name: str) -> TwoCell:
        if name in self.cells:
            return self.cells[name]
        for sort in self.sorts:
            for c in (delta_cell(sort), eps_cell(sort)):
                if c.name == name:
                    return c
            for other in self.sorts:
                if tau_cell(sort, other).name == name:
                    return tau_cell(sort, other)
        raise KeyError(name)

    def has(self, cell: TwoCell) -> bool:
        if cell.is_structure:
            return all(s in self.sorts for s in cell.source)
        return self.cells.get(cell.name) == cell

    def constructors(self, sort: str | None = None) -> list[TwoCell]:
        return [
            c for c in self.cells.values()
            if c.is_constructor and (sort is None or c.target[0] == sort)
        ]

    def functions(self) -> list[TwoCell]:
        return [c for c in self.cells.values() if c.is_function]

    def literal_family(self, sort: str) -> TwoCell | None:
        for c in self.constructors(sort):
            if c.literal_family:
                return c
        return None

    def declaration_index(self, cell: TwoCell) -> int:
        return self._index[cell.name]

    def tau(self, xi: str, zeta: str) -> TwoCell:
        return tau_cell(xi, zeta)

    def delta(self, xi: str) -> TwoCell:
        return delta_cell(xi)

    def eps(self, xi: str) -> TwoCell:
        return eps_cell(xi)


class Node(NamedTuple):
    cell: TwoCell
    literal: int | str | None = None


class Diagram:
    """An immutable 2-path.

    ``src[n]`` lists, for each input port of node ``n``, the producer port
    feeding it; ``out_src[j]`` is the producer of the j-th diagram output.
    Equality and hashing go through :func:`canonical_form`.
    """

    __slots__ = ("inputs", "outputs", "nodes", "src", "out_src", "_canon", "_consumers")

    def __init__(self, inputs, outputs, nodes, src, out_src):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.nodes = dict(nodes)
        self.src = {n: tuple(ps) for n, ps in src.items()}
        self.out_src = tuple(out_src)
        self._canon = None
        self._consumers = None

    def __repr__(self):
        return (
            f"Diagram({list(self.inputs)} -> {list(self.outputs)}, "
            f"{len(self.nodes)} cells)"
        )

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return canonical_form(self) == canonical_form(other)

    def __hash__(self):
        return hash(canonical_form(self))

    @property
    def consumers(self) -> dict:
        """Map from producer port to the consumer port it feeds."""
        if self._consumers is None:
            cons = {}
            for n, ps in self.src.items():
                for i, p in enumerate(ps):
                    cons[p] = (n, i)
            for j, p in enumerate(self.out_src):
                cons[p] = (OUT, j)
            self._consumers = cons
        return self._consumers

    def port_sort(self, port) -> str:
        n, j = port
        if n == IN:
            return self.inputs[j]
        return self.nodes[n].cell.target[j]

    def is_value(self) -> bool:
        return not self.inputs and all(nd.cell.is_constructor for nd in self.nodes.values())


# ------------------------------------------------------------ constructors


def identity(x: Sequence[str]) -> Diagram:
    x = tuple(x)
    return Diagram(x, x, {}, {}, [(IN, i) for i in range(len(x))])


def cell_diagram(cell: TwoCell, literal=None) -> Diagram:
    """The diagram made of a single cell."""
    return Diagram(
        cell.source, cell.target, {0: Node(cell, literal)},
        {0: [(IN, i) for i in range(len(cell.source))]},
        [(0, j) for j in range(len(cell.target))],
    )


def _relabel(d: Diagram, start: int, input_map=None):
    """Copy of d's nodes with ids shifted to start.., inputs remapped."""
    ids = {n: start + k for k, n in enumerate(sorted(d.nodes))}

    def port(p):
        if p[0] == IN:
            return input_map[p[1]] if input_map is not None else p
        return (ids[p[0]], p[1])

    nodes = {ids[n]: nd for n, nd in d.nodes.items()}
    src = {ids[n]: [port(p) for p in ps] for n, ps in d.src.items()}
    outs = [port(p) for p in d.out_src]
    return nodes, src, outs


def compose_parallel(*ds: Diagram) -> Diagram:
    """Juxtaposition f ⋆₀ g ⋆₀ ...; the node set is the disjoint union."""
    inputs, outputs, nodes, src, outs = [], [], {}, {}, []
    for d in ds:
        offset = len(inputs)
        imap = [(IN, offset + i) for i in range(len(d.inputs))]
        n2, s2, o2 = _relabel(d, len(nodes), imap)
        nodes.update(n2)
        src.update(s2)
        outs.extend(o2)
        inputs.extend(d.inputs)
        outputs.extend(d.outputs)
    return Diagram(inputs, outputs, nodes, src, outs)


def compose_sequential(f: Diagram, g: Diagram) -> Diagram:
    """Plug the outputs of f into the inputs of g (f ⋆₁ g)."""
    if f.outputs != g.inputs:
        for pos in range(max(len(f.outputs), len(g.inputs))):
            exp = g.inputs[pos] if pos < len(g.inputs) else None
            got = f.outputs[pos] if pos < len(f.outputs) else None
            if exp != got:
                raise TypeMismatch(pos, exp, got)
    nodes, src, outs = _relabel(f, 0)
    n2, s2, o2 = _relabel(g, len(nodes), outs)
    nodes.update(n2)
    src.update(s2)
    return Diagram(f.inputs, g.outputs, nodes, src, o2)


def cell_count(d: Diagram) -> int:
    return len(d.nodes)


def structure_count(d: Diagram) -> int:
    return sum(1 for nd in d.nodes.values() if nd.cell.is_structure)


# -------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def validate(d: Diagram, sig: Signature | None = None) -> list[Violation]:
    """Return every invariant violation found in ``d``; empty means valid."""
    out: list[Violation] = []

    def bad(kind, msg):
        out.append(Violation(kind, msg))

    used: dict = {}
    for n, nd in d.nodes.items():
        cell = nd.cell
        if sig is not None and not sig.has(cell):
            bad("unknown-cell", f"node {n}: {cell.name} is not in the signature")
        if cell.literal_family:
            if not isinstance(nd.literal, (int, str)) or (isinstance(nd.literal, int) and nd.literal < 0):
                bad("literal", f"node {n}: literal family {cell.name} needs an index")
        elif nd.literal is not None:
            bad("literal", f"node {n}: {cell.name} takes no literal index")
        ps = d.src.get(n)
        if ps is None or len(ps) != len(cell.source):
            bad("arity", f"node {n}: {cell.name} expects {len(cell.source)} inputs")
            continue
        for i, p in enumerate(ps):
            used.setdefault(p, []).append((n, i))
    for j, p in enumerate(d.out_src):
        used.setdefault(p, []).append((OUT, j))
    if len(d.out_src) != len(d.outputs):
        bad("arity", "output boundary length differs from its wiring")
    if set(d.src) - set(d.nodes):
        bad("dangling", "wiring refers to missing nodes")

    def sort_of(p):
        n, j = p
        if n == IN:
            return d.inputs[j] if 0 <= j < len(d.inputs) else None
        nd = d.nodes.get(n)
        if nd is None or not 0 <= j < len(nd.cell.target):
            return None
        return nd.cell.target[j]

    for p, cs in used.items():
        s = sort_of(p)
        if s is None:
            bad("dangling", f"port {p} does not exist")
            continue
        if len(cs) > 1:
            bad("sharing", f"port {p} feeds {len(cs)} consumers")
        for c in cs:
            if c[0] == OUT and c[1] >= len(d.outputs):
                continue
            want = d.outputs[c[1]] if c[0] == OUT else d.nodes[c[0]].cell.source[c[1]]
            if want != s:
                bad("sort", f"wire {p} -> {c} connects {s} to {want}")
    for i in range(len(d.inputs)):
        if (IN, i) not in used:
            bad("dangling", f"input {i} is not connected")
    for n, nd in d.nodes.items():
        for j in range(len(nd.cell.target)):
            if (n, j) not in used:
                bad("dangling", f"output {j} of node {n} is not connected")
    if _topo(d) is None:
        bad("cycle", "the port graph has a cycle")
    return out


def _topo(d: Diagram):
    indeg = {n: 0 for n in d.nodes}
    succ: dict = {n: [] for n in d.nodes}
    for n, ps in d.src.items():
        if n not in indeg:
            continue
        for p in ps:
            if p[0] >= 0 and p[0] in succ:
                succ[p[0]].append(n)
                indeg[n] += 1
    ready = deque(sorted(n for n, k in indeg.items() if k == 0))
    order = []
    while ready:
        n = ready.popleft()
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if not indeg[m]:
                ready.append(m)
    return order if len(order) == len(d.nodes) else None


def topological_order(d: Diagram) -> list[int]:
    order = _topo(d)
    if order is None:
        raise ValueError("diagram has a cycle")
    return order


# ---------------------------------------------------------- canonical form


def _lit(x) -> str:
    if x is None:
        return ""
    return f"${x}" if isinstance(x, str) else str(x)


def _bfs_number(d: Diagram, starts, numbering: dict):
    cons = d.consumers
    queue = deque()
    for n in starts:
        if n >= 0 and n not in numbering:
            numbering[n] = len(numbering)
            queue.append(n)
    while queue:
        n = queue.popleft()
        nd = d.nodes[n]
        nbrs = [p[0] for p in d.src[n]]
        nbrs += [cons[(n, j)][0] for j in range(len(nd.cell.target))]
        for m in nbrs:
            if m >= 0 and m not in numbering:
                numbering[m] = len(numbering)
                queue.append(m)


def _serialize(d: Diagram, numbering: dict, members) -> list[str]:
    def port(p):
        return f"i{p[1]}" if p[0] == IN else f"{numbering[p[0]]}.{p[1]}"

    rows = []
    for n in sorted(members, key=numbering.__getitem__):
        nd = d.nodes[n]
        ins = ",".join(port(p) for p in d.src[n])
        rows.append(f"{numbering[n]}:{nd.cell.name}:{_lit(nd.literal)}({ins})")
    return rows


def boundary_numbering(d: Diagram) -> dict:
    """Canonical numbering of the nodes reachable from the boundary."""
    cons = d.consumers
    numbering: dict = {}
    starts = [cons[(IN, i)][0] for i in range(len(d.inputs))]
    starts += [p[0] for p in d.out_src]
    _bfs_number(d, starts, numbering)
    return numbering


def canonical_form(d: Diagram) -> bytes:
    """Byte string that is equal for two diagrams iff they are isomorphic
    as boundary-anchored port graphs."""
    if d._canon is not None:
        return d._canon
    numbering = boundary_numbering(d)
    head = "in:" + ",".join(d.inputs) + "|out:" + ",".join(d.outputs)
    rows = _serialize(d, numbering, list(numbering))
    outs = ",".join(
        f"i{p[1]}" if p[0] == IN else f"{numbering[p[0]]}.{p[1]}" for p in d.out_src
    )
    closed = []
    rest = set(d.nodes) - set(numbering)
    while rest:
        comp = _component(d, min(rest))
        rest -= comp
        best = None
        for start in comp:
            local: dict = {}
            _bfs_number(d, [start], local)
            s = ";".join(_serialize(d, local, comp))
            if best is None or s < best:
                best = s
        closed.append(best)
    closed.sort()
    text = head + "\n" + ";".join(rows) + "\nouts:" + outs + "\n" + "\n".join(f"closed:{c}" for c in closed)
    d._canon = text.encode()
    return d._canon


def _component(d: Diagram, start: int) -> set:
    cons = d.consumers
    seen = {start}
    stack = [start]
    while stack:
        n = stack.pop()
        nd = d.nodes[n]
        nbrs = [p[0] for p in d.src[n]]
        nbrs += [cons[(n, j)][0] for j in range(len(nd.cell.target))]
        for m in nbrs:
            if m >= 0 and m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


# ------------------------------------------------------------------ slices


class Slice(NamedTuple):
    """``id_left ⋆₀ cell ⋆₀ id_right`` where ``left`` has ``offset`` wires."""

    offset: int
    cell: TwoCell
    literal: int | str | None = None


def from_slices(inputs: Sequence[str], slices: Iterable[Slice]) -> Diagram:
    seq = [(IN, i) for i in range(len(inputs))]
    sorts = list(inputs)
    nodes, src = {}, {}
    for n, (k, cell, lit) in enumerate(slices):
        a = len(cell.source)
        if k < 0 or k + a > len(seq):
            raise ValueError(f"slice {n} at offset {k} does not fit {len(seq)} wires")
        found = tuple(sorts[k:k + a])
        if found != cell.source:
            pos = next(i for i in range(a) if found[i] != cell.source[i])
            raise TypeMismatch(k + pos, cell.source[pos], found[pos])
        nodes[n] = Node(cell, lit)
        src[n] = seq[k:k + a]
        seq[k:k + a] = [(n, j) for j in range(len(cell.target))]
        sorts[k:k + a] = cell.target
    return Diagram(inputs, sorts, nodes, src, seq)


def slicing(d: Diagram) -> list[Slice]:
    """A slice sequence for ``d``; ValueError for diagrams that need crossings.

    Reads the diagram top-down first and, failing that, bottom-up (slicing
    the mirror image and reversing)."""
    try:
        return [Slice(k, d.nodes[n].cell, d.nodes[n].literal) for k, n in _slicing(d)]
    except ValueError:
        pass
    mirror = {}
    for n, nd in d.nodes.items():
        mirror[n] = Node(TwoCell(nd.cell.name, nd.cell.target, nd.cell.source, Kind.FUNCTION))
    cons = d.consumers
    src = {n: [_flip(cons[(n, j)]) for j in range(len(nd.cell.target))] for n, nd in d.nodes.items()}
    out_src = [_flip(cons[(IN, i)]) for i in range(len(d.inputs))]
    up = _slicing(Diagram(d.outputs, d.inputs, mirror, src, out_src))
    return [Slice(k, d.nodes[n].cell, d.nodes[n].literal) for k, n in reversed(up)]


def _flip(p):
    return (IN, p[1]) if p[0] == OUT else p


def _slicing(d: Diagram) -> list[tuple[int, int]]:
    """Cells fed from the inputs are taken leftmost first once their input
    wires sit side by side on the current cut; closed subtrees (no path
    from the inputs) are emitted just in time, right where their consumer
    reads them.  ValueError for diagrams that need crossings.
    """
    closed: set = set()
    for n in topological_order(d):
        if all(p != IN and p in closed for p, _ in d.src[n]):
            closed.add(n)
    seq = [(IN, i) for i in range(len(d.inputs))]
    left = set(d.nodes)
    out: list[tuple[int, int]] = []

    def emit(n: int, off: int) -> None:
        for i, (p, _) in enumerate(d.src[n]):
            if len(d.nodes[p].cell.target) != 1:
                raise ValueError("closed cells feeding one consumer from several outputs are not supported")
            emit(p, off + i)
        out.append((off, n))
        left.discard(n)

    def place(n: int, k: int) -> None:
        ps = d.src[n]
        for i, (p, j) in enumerate(ps):
            if p in closed and p in left:
                if len(d.nodes[p].cell.target) != 1:
                    raise ValueError("closed cells feeding one consumer from several outputs are not supported")
                emit(p, k + i)
                seq.insert(k + i, (p, j))
        out.append((k, n))
        seq[k:k + len(ps)] = [(n, j) for j in range(len(d.nodes[n].cell.target))]
        left.discard(n)

    while left - closed:
        where = {p: k for k, p in enumerate(seq)}
        best = None
        for n in left - closed:
            ps = d.src[n]
            present = [p for p in ps if p in where]
            if len(present) + sum(1 for p in ps if p[0] in closed and p[0] in left) != len(ps):
                continue
            k = where[present[0]]
            if all(where[p] == k + i for i, p in enumerate(present)) and (best is None or k < best[0]):
                best = (k, n)
        if best is None:
            raise ValueError("diagram has no planar slicing")
        place(best[1], best[0])
    for j, p in enumerate(d.out_src):
        if p[0] != IN and p[0] in left:
            t = len(d.nodes[p[0]].cell.target)
            if list(d.out_src[j:j + t]) != [(p[0], i) for i in range(t)]:
                raise ValueError("diagram has no planar slicing")
            emit(p[0], j)
            seq[j:j] = d.out_src[j:j + t]
    for n in sorted(left):
        if n in left and not d.nodes[n].cell.target:
            emit(n, len(seq))
    if left:
        raise ValueError("diagram has no planar slicing")
    if seq != list(d.out_src):
        raise ValueError("diagram has no planar slicing")
    return out


def compose_slices(inputs: Sequence[str], slices: Iterable[Slice]) -> Diagram:
    """Same as :func:`from_slices` but folded with the two compositions."""
    d = identity(inputs)
    for k, cell, lit in slices:
        wires = d.outputs
        layer = compose_parallel(
            identity(wires[:k]), cell_diagram(cell, lit), identity(wires[k + len(cell.source):])
        )
        d = compose_sequential(d, layer)
    return d


def _swap(s1: Slice, s2: Slice):
    """Try to exchange two consecutive slices; None when they interact."""
    k1, a1, b1 = s1.offset, len(s1.cell.source), len(s1.cell.target)
    k2, a2, b2 = s2.offset, len(s2.cell.source), len(s2.cell.target)
    if k2 + a2 <= k1:
        return s2, s1._replace(offset=k1 + b2 - a2)
    if k2 >= k1 + b1:
        return s2._replace(offset=k2 - b1 + a1), s1
    return None


def reslice(slices: Sequence[Slice], rng: random.Random, moves: int | None = None) -> list[Slice]:
    """Random sequence of exchange-law moves applied to a slicing."""
    out = list(slices)
    if len(out) < 2:
        return out
    for _ in range(moves if moves is not None else 4 * len(out) ** 2):
        i = rng.randrange(len(out) - 1)
        r = _swap(out[i], out[i + 1])
        if r is not None:
            out[i], out[i + 1] = r
    return out


# ------------------------------------------------------------------ values


class Term(NamedTuple):
    """A closed constructor tree."""

    cell: TwoCell
    literal: int | None = None
    args: tuple = ()

    def size(self) -> int:
        n, stack = 0, [self]
        while stack:
            t = stack.pop()
            n += 1
            stack.extend(t.args)
        return n

    def __str__(self):
        head = self.cell.name if self.literal is None else f"{self.cell.name}[{self.literal}]"
        if not self.args:
            return head
        return f"{head}({', '.join(map(str, self.args))})"


def term_slices(terms: Sequence[Term], start: int = 0) -> list[Slice]:
    """Post-order slicing of a forest of closed terms placed from ``start``."""
    out: list[Slice] = []
    for i, t in enumerate(terms):
        stack = [(t, start + i, False)]
        while stack:
            t, pos, expanded = stack.pop()
            if expanded or not t.args:
                out.append(Slice(pos, t.cell, t.literal))
                continue
            stack.append((t, pos, True))
            stack.extend((a, pos + j, False) for j, a in reversed(list(enumerate(t.args))))
    return out


def value_diagram(terms: Sequence[Term]) -> Diagram:
    return from_slices((), term_slices(terms))


def decode_values(d: Diagram) -> tuple[Term, ...]:
    """Read the outputs of a closed constructor diagram back as terms."""
    if d.inputs:
        raise NotAValue("diagram has inputs", d)
    memo: dict = {}
    for p in d.out_src:
        if p[0] < 0:
            raise NotAValue("output wired to the input boundary", d)
        stack = [p[0]]
        while stack:
            n = stack[-1]
            if n in memo:
                stack.pop()
                continue
            nd = d.nodes[n]
            if not nd.cell.is_constructor:
                raise NotAValue(f"normal form contains the non-constructor cell {nd.cell.name}", d)
            todo = [q[0] for q in d.src[n] if q[0] not in memo]
            if todo:
                stack.extend(todo)
                continue
            stack.pop()
            memo[n] = Term(nd.cell, nd.literal, tuple(memo[q[0]] for q in d.src[n]))
    terms = tuple(memo[p[0]] for p in d.out_src)
    if len(memo) != len(d.nodes):
        stray = next(nd for n, nd in d.nodes.items() if n not in memo)
        raise NotAValue(f"normal form contains a disconnected {stray.cell.name}", d)
    return terms
