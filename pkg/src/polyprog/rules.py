"""Rules (3-cells), compiled patterns and programs."""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

from .core import IN, Diagram, Kind, Signature, TwoCell, structure_count, topological_order


class RuleKind(Enum):
    COMPUTATION = "computation"
    STRUCTURE = "structure"


class RuleError(ValueError):
    pass


class PVar(NamedTuple):
    index: int


class PCon(NamedTuple):
    cell: TwoCell
    literal: int | str | None
    children: tuple


_OPS = {"<=": operator.le, "<": operator.lt, "=": operator.eq,
        ">=": operator.ge, ">": operator.gt, "!=": operator.ne}


class Comparison(NamedTuple):
    """A guard ``left op right`` over literal indices."""

    op: str
    left: int | str
    right: int | str

    def holds(self, env: dict) -> bool:
        a = env[self.left] if isinstance(self.left, str) else self.left
        b = env[self.right] if isinstance(self.right, str) else self.right
        return _OPS[self.op](a, b)

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


def _pattern(d: Diagram, port) -> PVar | PCon:
    n, j = port
    if n == IN:
        return PVar(j)
    nd = d.nodes[n]
    if not nd.cell.is_constructor:
        raise RuleError(f"{nd.cell.name} cannot appear inside a left-hand side pattern")
    return PCon(nd.cell, nd.literal, tuple(_pattern(d, p) for p in d.src[n]))


@dataclass(eq=False)
class Rule:
    """A rewrite rule ``lhs ⇛ rhs``.

    The left-hand side must be a single non-constructor cell (the anchor)
    fed by constructor trees whose leaves are the rule inputs.
    """

    name: str
    lhs: Diagram
    rhs: Diagram
    kind: RuleKind = RuleKind.COMPUTATION
    guard: tuple = ()
    anchor_cell: TwoCell = field(init=False)
    patterns: tuple = field(init=False)
    template: tuple = field(init=False)

    def __post_init__(self):
        self.guard = tuple(self.guard)
        self.kind_name = self.kind.value
        lhs, rhs = self.lhs, self.rhs
        if lhs.inputs != rhs.inputs or lhs.outputs != rhs.outputs:
            raise RuleError(f"rule {self.name}: both sides must have the same boundary")
        anchors = [n for n, nd in lhs.nodes.items() if not nd.cell.is_constructor]
        if len(anchors) != 1:
            raise RuleError(f"rule {self.name}: the left-hand side needs exactly one non-constructor cell")
        anchor = anchors[0]
        cell = lhs.nodes[anchor].cell
        want = Kind.FUNCTION if self.kind is RuleKind.COMPUTATION else None
        if want is not None and cell.kind is not want:
            raise RuleError(f"rule {self.name}: computation rules must be anchored on a function")
        if self.kind is RuleKind.STRUCTURE and not cell.is_structure:
            raise RuleError(f"rule {self.name}: structure rules must be anchored on a structure cell")
        if list(lhs.out_src) != [(anchor, j) for j in range(len(cell.target))]:
            raise RuleError(f"rule {self.name}: the anchor outputs must be the rule outputs")
        self.anchor_cell = cell
        self.patterns = tuple(_pattern(lhs, p) for p in lhs.src[anchor])
        schema = {nd.literal for nd in lhs.nodes.values() if isinstance(nd.literal, str)}
        for nd in rhs.nodes.values():
            if isinstance(nd.literal, str) and nd.literal not in schema:
                raise RuleError(f"rule {self.name}: literal variable {nd.literal} is unbound")
        for g in self.guard:
            for side in (g.left, g.right):
                if isinstance(side, str) and side not in schema:
                    raise RuleError(f"rule {self.name}: guard variable {side} is unbound")
        order = topological_order(rhs)
        pos = {n: k for k, n in enumerate(order)}

        def entry(p):
            return ("in", p[1]) if p[0] == IN else ("node", pos[p[0]], p[1])

        nodes = tuple(rhs.nodes[n] for n in order)
        srcs = tuple(tuple(entry(p) for p in rhs.src[n]) for n in order)
        outs = tuple(entry(p) for p in rhs.out_src)
        self.template = (nodes, srcs, outs)
        self.has_eps = any(nd.cell.kind is Kind.EPS for nd in nodes)

    @property
    def arity(self) -> int:
        return len(self.lhs.inputs)

    def structure_cells(self) -> int:
        return structure_count(self.rhs)

    def __repr__(self):
        return f"<rule {self.name}>"


class Program:
    """A signature with its computation rules; structure rules are derived."""

    def __init__(self, name: str, signature: Signature, rules: Sequence[Rule]):
        self.name = name
        self.signature = signature
        self.rules = list(rules)
        names = set()
        for r in self.rules:
            if r.name in names:
                raise RuleError(f"duplicate rule name {r.name}")
            names.add(r.name)
            if r.kind is not RuleKind.COMPUTATION:
                raise RuleError(f"rule {r.name}: only computation rules are listed explicitly")
            if not signature.has(r.anchor_cell):
                raise RuleError(f"rule {r.name}: unknown function {r.anchor_cell.name}")
        self._by_cell: dict[str, list[Rule]] = {}
        for r in self.rules:
            self._by_cell.setdefault(r.anchor_cell.name, []).append(r)

    def __repr__(self):
        return f"Program({self.name!r}, {len(self.rules)} rules)"

    def rules_for(self, cell: TwoCell) -> list[Rule]:
        """Rules anchored on ``cell``; structure rules are built on first use."""
        got = self._by_cell.get(cell.name)
        if got is None:
            if cell.is_structure:
                from .structure import structure_rules_for

                got = structure_rules_for(self.signature, cell)
            else:
                got = []
            self._by_cell[cell.name] = got
        return got

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def K(self) -> int:
        """Largest number of structure cells in a computation right-hand side."""
        return max((r.structure_cells() for r in self.rules), default=0)
