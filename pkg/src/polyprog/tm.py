"""Turing machines: a text format, a direct simulator and two compilers
into programs (plain, and clocked by a polynomial)."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from . import natexpr as nx
from .syntax import BLANK, letter_cell_name, load

MOVES = ("L", "R")
_NAME = re.compile(r"[A-Za-z0-9]+")


class TMFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class NondeterministicMachine(ValueError):
    pass


class StepLimit(RuntimeError):
    def __init__(self, steps: int):
        super().__init__(f"no halt within {steps} transitions")
        self.steps = steps


@dataclass(frozen=True)
class TuringMachine:
    """``transitions`` maps (state, letter) to the tuple of its choices
    (state, written letter, move).  ``_`` is the blank.  A machine halts
    exactly when it enters one of the ``halting`` states."""

    name: str
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    halting: frozenset[str]
    transitions: Mapping[tuple[str, str], tuple[tuple[str, str, str], ...]] = field(hash=False)

    @property
    def letters(self) -> tuple[str, ...]:
        """The alphabet with the blank, blank last."""
        return self.alphabet + (BLANK,)

    @property
    def deterministic(self) -> bool:
        return all(len(v) == 1 for v in self.transitions.values())

    def validate(self) -> None:
        if self.initial not in self.states:
            raise TMFormatError(f"initial state {self.initial} is not declared")
        for h in self.halting:
            if h not in self.states:
                raise TMFormatError(f"halting state {h} is not declared")
        for (q, a), choices in self.transitions.items():
            if q in self.halting:
                raise TMFormatError(f"halting state {q} has a transition on {a}")
            for p, b, move in choices:
                if p not in self.states:
                    raise TMFormatError(f"unknown state {p}")
                if b not in self.letters or a not in self.letters:
                    raise TMFormatError(f"unknown letter in ({q}, {a}) -> {b}")
                if move not in MOVES:
                    raise TMFormatError(f"move must be L or R, got {move}")
        missing = [(q, a) for q in self.states if q not in self.halting
                   for a in self.letters if (q, a) not in self.transitions]
        if missing:
            q, a = missing[0]
            raise TMFormatError(f"no transition for state {q} reading {a}"
                                + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else ""))


def parse_tm(text: str) -> TuringMachine:
    """Read a machine description.

    ::

        machine increment
        alphabet 0 1
        initial start
        halt done
        transitions
          start _ -> carry _ R
          ...

    States are alphanumeric names, letters single alphanumeric characters
    and ``_`` the blank.  Every non-halting state needs a transition for
    every letter; listing several for one pair makes the machine
    non-deterministic.
    """
    name = "machine"
    alphabet: list[str] | None = None
    initial = None
    halting: list[str] = []
    states: list[str] = []
    table: dict[tuple[str, str], list] = {}
    in_table = False

    def state(s, line):
        if not _NAME.fullmatch(s):
            raise TMFormatError(f"bad state name {s!r}", line)
        if s not in states:
            states.append(s)
        return s

    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        if in_table and "->" in words:
            if alphabet is None:
                raise TMFormatError("alphabet must come before transitions", no)
            if len(words) != 6 or words[2] != "->":
                raise TMFormatError("expected 'state letter -> state letter move'", no)
            q, a, _, p, b, move = words
            for x in (a, b):
                if x != BLANK and x not in alphabet:
                    raise TMFormatError(f"{x!r} is not in the alphabet", no)
            if move not in MOVES:
                raise TMFormatError(f"move must be L or R, got {move!r}", no)
            table.setdefault((state(q, no), a), []).append((state(p, no), b, move))
            continue
        in_table = False
        if head == "machine" and len(words) == 2:
            name = words[1]
        elif head == "alphabet":
            alphabet = words[1:]
            for x in alphabet:
                if len(x) != 1 or not x.isalnum():
                    raise TMFormatError(f"letters are single alphanumeric characters, got {x!r}", no)
            if len(set(alphabet)) != len(alphabet):
                raise TMFormatError("repeated letter", no)
        elif head == "initial" and len(words) == 2:
            initial = state(words[1], no)
        elif head == "halt":
            halting += [state(s, no) for s in words[1:]]
        elif head == "transitions" and len(words) == 1:
            in_table = True
        else:
            raise TMFormatError(f"unexpected line {line!r}", no)
    if alphabet is None or initial is None:
        raise TMFormatError("a machine needs 'alphabet' and 'initial' lines")
    tm = TuringMachine(name, tuple(states), tuple(alphabet), initial, frozenset(halting),
                       {k: tuple(v) for k, v in table.items()})
    tm.validate()
    return tm


def load_tm(path) -> TuringMachine:
    with open(path, encoding="utf-8") as fh:
        return parse_tm(fh.read())


# ----------------------------------------------------------------- simulator


def tm_simulate(tm: TuringMachine, word: str, max_steps: int = 10**6) -> tuple[str, int]:
    """Run ``tm`` on ``word`` and return (tape right of the head, transitions).

    The head starts on the blank just left of the input.
    """
    if not tm.deterministic:
        raise NondeterministicMachine(f"{tm.name} is not deterministic")
    left: list[str] = []  # nearest cell last
    right = list(reversed(word))  # nearest cell last
    q, a = tm.initial, BLANK
    steps = 0
    while q not in tm.halting:
        if steps >= max_steps:
            raise StepLimit(steps)
        (q, b, move), = tm.transitions[q, a]
        if move == "R":
            left.append(b)
            a = right.pop() if right else BLANK
        else:
            right.append(b)
            a = left.pop() if left else BLANK
        steps += 1
    return "".join(reversed(right)), steps


# ----------------------------------------------------------------- compilers


def _sym(a: str) -> str:
    return letter_cell_name(a)


def _step(prefix: str, q: str, a: str) -> str:
    return f"{prefix}_{q}_{_sym(a)[4:]}"


def _word_decls(tm: TuringMachine) -> list[str]:
    out = ["  nil : * -> word  a=1"]
    out += [f"  {_sym(a)} : word -> word  a=1" for a in tm.letters]
    return out


def _transition_rules(tm: TuringMachine, prefix: str, clock: bool) -> list[str]:
    """The four transition families: move direction crossed with whether
    the word the head moves into is empty."""
    n, sn = ("n, ", "s(n), ") if clock else ("", "")
    rules = []
    for q in tm.states:
        if q in tm.halting:
            continue
        for a in tm.letters:
            f = _step(prefix, q, a)
            for p, b, move in tm.transitions[q, a]:
                wb = _sym(b)
                if move == "R":
                    for c in tm.letters:
                        rules.append(f"  {f}({sn}l, {_sym(c)}(r)) => {_step(prefix, p, c)}({n}{wb}(l), r)")
                    rules.append(f"  {f}({sn}l, nil) => {_step(prefix, p, BLANK)}({n}{wb}(l), nil)")
                else:
                    for c in tm.letters:
                        rules.append(f"  {f}({sn}{_sym(c)}(l), r) => {_step(prefix, p, c)}({n}l, {wb}(r))")
                    rules.append(f"  {f}({sn}nil, r) => {_step(prefix, p, BLANK)}({n}nil, {wb}(r))")
            if clock:
                rules.append(f"  {f}(z, l, r) => let () = erase(l) in r")
    for h in sorted(tm.halting, key=tm.states.index):
        for a in tm.letters:
            f = _step(prefix, h, a)
            if clock:
                rules.append(f"  {f}(n, l, r) => let () = erase(n) in let () = erase(l) in r")
            else:
                rules.append(f"  {f}(l, r) => let () = erase(l) in r")
    return rules


def _check(tm: TuringMachine, allow_nondeterminism: bool) -> None:
    tm.validate()
    if not allow_nondeterminism and not tm.deterministic:
        pair = next(k for k, v in tm.transitions.items() if len(v) > 1)
        raise NondeterministicMachine(
            f"{tm.name} has {len(tm.transitions[pair])} transitions for {pair}; "
            "allow non-determinism (--nondeterministic) and evaluate exhaustively")


def tm_source(tm: TuringMachine, allow_nondeterminism: bool = False) -> str:
    """Program text simulating ``tm``: ``main`` starts the machine on the
    blank left of its input, each transition is one computation step and
    a halting state erases the left part of the tape."""
    _check(tm, allow_nondeterminism)
    steps = [_step("step", q, a) for q in tm.states for a in tm.letters]
    lines = [f"# Turing machine {tm.name}.", f"polygraph {tm.name}", "", "sorts word", "",
             "constructors", *_word_decls(tm), "", "functions", "  main : word -> word"]
    lines += [f"  {s} : word word -> word" for s in steps]
    lines += ["", "rules", f"  main(w) => {_step('step', tm.initial, BLANK)}(nil, w)"]
    lines += _transition_rules(tm, "step", clock=False)
    return "\n".join(lines) + "\n"


def compile_tm(tm: TuringMachine, allow_nondeterminism: bool = False):
    """The program simulating ``tm``; its entry point is ``main``."""
    return load(tm_source(tm, allow_nondeterminism)).program


class _Poly:
    """A clock polynomial in ``n`` rewritten over add, mult and numerals."""

    def __init__(self, text: str):
        try:
            self.expr = nx.parse_expr(text, ["n"])
        except nx.ExprSyntaxError as e:
            raise TMFormatError(f"clock polynomial: {e}") from None
        self.uses = 0
        self._fresh = 0
        self.vars: list[str] = []
        self.term = self._term(self.expr)

    def _term(self, e) -> str:
        if isinstance(e, nx.Var):
            self.uses += 1
            v = f"n{self.uses}"
            self.vars.append(v)
            return v
        if isinstance(e, nx.Const):
            return str(e.value)
        if isinstance(e, nx.Add):
            return self._fold("add", e.terms)
        if isinstance(e, nx.Mul):
            return self._fold("mult", e.factors)
        if isinstance(e, nx.Pow):
            return self._fold("mult", [e.base] * e.exp) if e.exp else "1"
        raise TMFormatError(f"clock polynomial may only use +, * and ^, not {e}")

    def _fold(self, f: str, args) -> str:
        terms = [self._term(a) for a in args]
        out = terms[-1]
        for t in reversed(terms[:-1]):
            out = f"{f}({t}, {out})"
        return out

    def bind(self, body: str) -> str:
        """``body`` under lets giving each use of ``n`` its own copy."""
        if not self.vars:
            return f"let () = erase(n) in {body}"
        if len(self.vars) == 1:
            return f"let {self.vars[0]} = n in {body}"
        out = body
        rest = "n"
        binds = []
        for k, v in enumerate(self.vars[:-1]):
            nxt = self.vars[-1] if k == len(self.vars) - 2 else f"m{k + 1}"
            binds.append(f"let ({v}, {nxt}) = dup({rest}) in ")
            rest = nxt
        return "".join(binds) + out

    def interpretation(self, arith_interp):
        """(current, heat) of the polynomial's diagram as expressions in ``i``."""
        add = arith_interp.of(arith_interp.program.signature.cell("add"))
        mult = arith_interp.of(arith_interp.program.signature.cell("mult"))
        i = nx.var(0)

        def go(e):
            if isinstance(e, nx.Var):
                return i, nx.lift(0)
            if isinstance(e, nx.Const):
                return nx.lift(e.value + 1), nx.lift(0)
            if isinstance(e, nx.Pow):
                if not e.exp:
                    return go(nx.lift(1))
                return fold(mult, [e.base] * e.exp)
            if isinstance(e, nx.Add):
                return fold(add, list(e.terms))
            return fold(mult, list(e.factors))

        def fold(ci, args):
            parts = [go(a) for a in args]
            cur, heat = parts[-1]
            for c, h in reversed(parts[:-1]):
                cur, heat = ci.current[0].subst([c, cur]), h + heat + ci.heat.subst([c, cur])
            return cur, heat

        cur, heat = go(self.expr)
        return cur.normal(), heat.normal()


def clocked_source(tm: TuringMachine, clock: str, allow_nondeterminism: bool = False) -> str:
    """Program text for ``tm`` run under a counter initialised to
    ``clock`` evaluated at the input length, bundled with its interpretation."""
    from .suite import builtin_arith

    _check(tm, allow_nondeterminism)
    poly = _Poly(clock)
    arith, arith_interp = builtin_arith()
    arith_text = load_arith_text()
    arith_rules = arith_text.split("rules\n", 1)[1].split("\n\n", 1)[0].splitlines()
    steps = [_step("clockstep", q, a) for q in tm.states for a in tm.letters]
    lines = [f"# Turing machine {tm.name} under the clock {clock}.", f"polygraph {tm.name}_clocked", "",
             "sorts nat word", "", "constructors", "  z : * -> nat  a=1", "  s : nat -> nat  a=1",
             *_word_decls(tm), "", "functions", "  add : nat nat -> nat", "  mult : nat nat -> nat",
             "  size : word -> nat", "  main : word -> word"]
    lines += [f"  {s} : nat word word -> word" for s in steps]
    start = _step("clockstep", tm.initial, BLANK)
    lines += ["", "rules", *arith_rules,
              "  size(nil) => z", *[f"  size({_sym(a)}(w)) => s(size(w))" for a in tm.letters],
              "  main(w) => let (w1, w2) = dup(w) in let n = size(w1) in "
              + poly.bind(f"{start}({poly.term}, nil, w2)")]
    lines += _transition_rules(tm, "clockstep", clock=True)
    cur, heat = poly.interpretation(arith_interp)
    names = ["i"]
    lines += ["", "interpretation"]
    for c in ("add", "mult"):
        ci = arith_interp.of(arith.signature.cell(c))
        lines.append(f"  {c}(i, j): current {ci.current[0].format(['i', 'j'])}; heat {ci.heat.format(['i', 'j'])}")
    lines.append("  size(i): current i; heat i")
    main_cur = (cur + nx.var(0) + 1).normal()
    main_heat = (heat + cur + nx.var(0) + 1).normal()
    lines.append(f"  main(i): current {main_cur.format(names)}; heat {main_heat.format(names)}")
    lines += [f"  {s}(i, j, k): current i + j + k; heat i" for s in steps]
    return "\n".join(lines) + "\n"


def load_arith_text() -> str:
    from .suite import data_text

    return data_text("arith.poly")


def compile_clocked_tm(tm: TuringMachine, clock: str, allow_nondeterminism: bool = False):
    """(program, interpretation) for ``tm`` under the clock polynomial ``clock`` in ``n``."""
    loaded = load(clocked_source(tm, clock, allow_nondeterminism))
    return loaded.program, loaded.interpretation


__all__ = [
    "NondeterministicMachine", "StepLimit", "TMFormatError", "TuringMachine", "clocked_source",
    "compile_clocked_tm", "compile_tm", "load_tm", "parse_tm", "tm_simulate", "tm_source",
]
