"""Planar construction of diagrams from term-like descriptions.

The builder keeps the left-to-right sequence of open wires and emits one
:class:`~polyprog.core.Slice` per cell.  When a cell needs wires that are not
adjacent, they are brought together by adjacent swaps (insertion sort), each
swap being a τ cell.  Closed sub-terms have no fixed position yet, so they
float until some consumer needs them and are then built in place.
"""
from __future__ import annotations

from typing import Sequence

from .core import Slice, TwoCell, TypeMismatch, from_slices, tau_cell


class _Recipe:
    __slots__ = ("cell", "literal", "args", "wires")

    def __init__(self, cell, literal, args):
        self.cell = cell
        self.literal = literal
        self.args = args
        self.wires = None


class Floating:
    """Output ``index`` of a closed sub-term that is not placed yet."""

    __slots__ = ("recipe", "index")

    def __init__(self, recipe: _Recipe, index: int):
        self.recipe = recipe
        self.index = index


class Builder:
    def __init__(self, inputs: Sequence[str]):
        self.input_sorts = tuple(inputs)
        self.seq: list[int] = list(range(len(inputs)))
        self.sort = dict(enumerate(inputs))
        self.slices: list[Slice] = []
        self._next = len(inputs)

    @property
    def inputs(self) -> list[int]:
        return list(range(len(self.input_sorts)))

    def sort_of(self, h) -> str:
        if isinstance(h, Floating):
            return h.recipe.cell.target[h.index]
        return self.sort[h]

    # -------------------------------------------------------------- public

    def apply(self, cell: TwoCell, handles: Sequence, literal=None) -> list:
        """Feed ``handles`` to ``cell`` and return handles for its outputs."""
        handles = [self._resolve(h) for h in handles]
        if not any(isinstance(h, int) for h in handles):
            r = _Recipe(cell, literal, handles)
            if not cell.target:
                # nothing will ever pull on it, so build it right away
                self._place(r, len(self.seq))
                return []
            return [Floating(r, j) for j in range(len(cell.target))]
        return self._realize(cell, literal, handles, None)

    def finish(self, handles: Sequence) -> list[Slice]:
        """Arrange the open wires to be exactly ``handles``, in order."""
        wires = self._arrange(list(handles), 0)
        if self.seq != wires:
            raise ValueError("some wires are left unused")
        return self.slices

    def diagram(self, handles: Sequence):
        return from_slices(self.input_sorts, self.finish(handles))

    # ------------------------------------------------------------ internals

    def _fresh(self, sort: str) -> int:
        w = self._next
        self._next += 1
        self.sort[w] = sort
        return w

    def _resolve(self, h):
        if isinstance(h, Floating) and h.recipe.wires is not None:
            return h.recipe.wires[h.index]
        return h

    def _place(self, r: _Recipe, pos: int) -> list[int]:
        r.wires = self._realize(r.cell, r.literal, [self._resolve(h) for h in r.args], pos)
        return r.wires

    def _arrange(self, handles: list, hint: int) -> list[int]:
        """Place floating handles, then gather everything contiguously."""
        handles = [self._resolve(h) for h in handles]
        first = next((h for h in handles if isinstance(h, int)), None)
        wires: list[int] = []
        for h in handles:
            h = self._resolve(h)
            if isinstance(h, Floating):
                if wires:
                    p = self.seq.index(wires[-1]) + 1
                elif first is not None:
                    p = self.seq.index(first)
                else:
                    p = min(hint, len(self.seq))
                self._place(h.recipe, p)
                h = h.recipe.wires[h.index]
            wires.append(h)
        self._gather(wires)
        return wires

    def _gather(self, wires: list[int]) -> None:
        if not wires:
            return
        seq = self.seq
        start = seq.index(wires[0])
        for i in range(1, len(wires)):
            q = seq.index(wires[i])
            end = start + i
            if q >= end:
                while q > end:
                    self._swap(q - 1)
                    q -= 1
            else:
                # left of the block: walk right, then across the block
                while q < start - 1:
                    self._swap(q)
                    q += 1
                for _ in range(i):
                    self._swap(q)
                    q += 1
                start -= 1
        assert seq[start:start + len(wires)] == wires

    def _swap(self, k: int) -> None:
        seq = self.seq
        u, w = seq[k], seq[k + 1]
        self.slices.append(Slice(k, tau_cell(self.sort[u], self.sort[w])))
        seq[k], seq[k + 1] = w, u

    def _realize(self, cell, literal, handles, hint) -> list[int]:
        wires = self._arrange(handles, hint if hint is not None else len(self.seq))
        got = tuple(self.sort[w] for w in wires)
        if got != cell.source:
            pos = next((i for i, (a, b) in enumerate(zip(got, cell.source)) if a != b),
                       min(len(got), len(cell.source)))
            exp = cell.source[pos] if pos < len(cell.source) else None
            found = got[pos] if pos < len(got) else None
            raise TypeMismatch(pos, exp, found)
        if wires:
            k = self.seq.index(wires[0])
        else:
            k = min(hint if hint is not None else len(self.seq), len(self.seq))
        self.slices.append(Slice(k, cell, literal))
        outs = [self._fresh(s) for s in cell.target]
        self.seq[k:k + len(wires)] = outs
        return outs
