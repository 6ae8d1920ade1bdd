"""Generalized structure diagrams and the structure rules.

The swap, duplication and erasure of a whole block of wires are built by
induction from the elementary τ, δ and ε cells.  The structure rules push a
constructor through a structure cell: the constructor goes out on the other
side and the structure cell is replaced by its generalization over the
constructor's inputs.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .core import Diagram, Kind, Signature, Slice, TwoCell, delta_cell, eps_cell, from_slices, tau_cell
from .rules import Rule, RuleKind

SCHEMA = "n"  # literal variable used by structure rules over literal families


def _shift(slices: Iterable[Slice], k: int) -> list[Slice]:
    return [s._replace(offset=s.offset + k) for s in slices]


def tau_slices(x: Sequence[str], y: Sequence[str]) -> list[Slice]:
    """Slices of the block swap ``x ++ y ⇒ y ++ x``."""
    out = []
    for i, zeta in enumerate(y):
        # wire i of y starts at len(x) + i and moves left past all of x
        for k in range(len(x) - 1, -1, -1):
            out.append(Slice(i + k, tau_cell(x[k], zeta)))
    return out


def delta_slices(x: Sequence[str]) -> list[Slice]:
    if not x:
        return []
    xi, y = x[0], tuple(x[1:])
    out = [Slice(0, delta_cell(xi))]
    out += _shift(delta_slices(y), 2)
    out += _shift(tau_slices((xi,), y), 1)
    return out


def eps_slices(x: Sequence[str]) -> list[Slice]:
    return [Slice(0, eps_cell(s)) for s in x]


def tau_general(x: Sequence[str], y: Sequence[str]) -> Diagram:
    return from_slices(tuple(x) + tuple(y), tau_slices(x, y))


def tau_path(x: Sequence[str], zeta: str) -> Diagram:
    """``x ++ [zeta] ⇒ [zeta] ++ x``."""
    return tau_general(x, (zeta,))


def delta_path(x: Sequence[str]) -> Diagram:
    """``x ⇒ x ++ x``."""
    return from_slices(tuple(x), delta_slices(x))


def eps_path(x: Sequence[str]) -> Diagram:
    """``x ⇒ ∗``."""
    return from_slices(tuple(x), eps_slices(x))


def _lit(c: TwoCell):
    return SCHEMA if c.literal_family else None


def _label(c: TwoCell) -> str:
    return c.name


def delta_rule(c: TwoCell) -> Rule:
    x, xi = c.source, c.target[0]
    lhs = from_slices(x, [Slice(0, c, _lit(c)), Slice(0, delta_cell(xi))])
    rhs = from_slices(x, delta_slices(x) + [Slice(0, c, _lit(c)), Slice(1, c, _lit(c))])
    return Rule(f"{_label(c)}/delta", lhs, rhs, RuleKind.STRUCTURE)


def eps_rule(c: TwoCell) -> Rule:
    x, xi = c.source, c.target[0]
    lhs = from_slices(x, [Slice(0, c, _lit(c)), Slice(0, eps_cell(xi))])
    return Rule(f"{_label(c)}/eps", lhs, eps_path(x), RuleKind.STRUCTURE)


def tau_left_rule(c: TwoCell, zeta: str) -> Rule:
    """``(c ⋆₀ id_zeta) ⋆₁ τ  ⇛  τ_(x,zeta) ⋆₁ (id_zeta ⋆₀ c)``."""
    x, xi = c.source, c.target[0]
    ins = tuple(x) + (zeta,)
    lhs = from_slices(ins, [Slice(0, c, _lit(c)), Slice(0, tau_cell(xi, zeta))])
    rhs = from_slices(ins, tau_slices(x, (zeta,)) + [Slice(1, c, _lit(c))])
    return Rule(f"{_label(c)}/tau-left[{zeta}]", lhs, rhs, RuleKind.STRUCTURE)


def tau_right_rule(c: TwoCell, zeta: str) -> Rule:
    """``(id_zeta ⋆₀ c) ⋆₁ τ  ⇛  τ_(zeta,x) ⋆₁ (c ⋆₀ id_zeta)``."""
    x, xi = c.source, c.target[0]
    ins = (zeta,) + tuple(x)
    lhs = from_slices(ins, [Slice(1, c, _lit(c)), Slice(0, tau_cell(zeta, xi))])
    rhs = from_slices(ins, tau_slices((zeta,), x) + [Slice(0, c, _lit(c))])
    return Rule(f"{_label(c)}/tau-right[{zeta}]", lhs, rhs, RuleKind.STRUCTURE)


def generate_structure_rules(sig: Signature, used_sorts: Iterable[str] | None = None) -> list[Rule]:
    """All structure rules: per constructor one δ-rule, one ε-rule and,
    for every sort in ``used_sorts``, both τ-rules."""
    used = list(sig.sorts if used_sorts is None else used_sorts)
    out = []
    for c in sig.constructors():
        out.append(delta_rule(c))
        out.append(eps_rule(c))
        for zeta in used:
            out.append(tau_left_rule(c, zeta))
            out.append(tau_right_rule(c, zeta))
    return out


def structure_rules_for(sig: Signature, cell: TwoCell) -> list[Rule]:
    """The structure rules anchored on one structure cell."""
    if cell.kind is Kind.DELTA:
        return [delta_rule(c) for c in sig.constructors(cell.source[0])]
    if cell.kind is Kind.EPS:
        return [eps_rule(c) for c in sig.constructors(cell.source[0])]
    if cell.kind is Kind.TAU:
        xi, zeta = cell.source
        return [tau_left_rule(c, zeta) for c in sig.constructors(xi)] + [
            tau_right_rule(c, xi) for c in sig.constructors(zeta)
        ]
    raise ValueError(f"{cell.name} is not a structure cell")
