"""The ``.poly`` program format: parsing, printing and elaboration.

A file is a sequence of sections whose headers start in column 0::

    polygraph arith
    sorts nat
    constructors
      z : * -> nat  a=1
      s : nat -> nat
    functions
      add : nat nat -> nat
    rules
      add(z, y) => y
      add(s(x), y) => s(add(x, y))
    interpretation
      add(i, j): current i + j; heat i

Items are indented; a line indented deeper than the item above continues it.
``#`` starts a comment.  Right-hand sides are let-terms where ``dup`` and
``erase`` stand for the duplication and erasure cells; wire crossings are
inserted by the elaborator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import natexpr as nx
from .builder import Builder
from .core import Kind, Signature, SignatureError, Term, TwoCell, TypeMismatch
from .interp import CellInterp, Interpretation
from .rules import Comparison, Program, Rule, RuleError

SECTIONS = ("polygraph", "sorts", "constructors", "functions", "rules", "interpretation")
KEYWORDS = {"let", "in", "when", "and", "dup", "erase"}


class ProgramError(ValueError):
    """A diagnostic with an optional source position (1-based)."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None and col is not None else (
            f"{line}: " if line is not None else "")
        super().__init__(where + message)


class ElaborationError(ProgramError):
    pass


# ---------------------------------------------------------------- syntax tree


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    id: str
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Num:
    value: int
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Lit:
    family: str
    index: int | str
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class App:
    head: str
    args: tuple
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Tup:
    items: tuple
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Let:
    names: tuple
    bound: object
    body: object
    single: bool = False  # written ``let a = ...`` rather than ``let (a) = ...``
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Cond:
    op: str
    left: int | str
    right: int | str


@dataclass(frozen=True)
class ConstructorDecl:
    name: str
    source: tuple
    sort: str
    a: int | None = None
    literal: bool = False
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    source: tuple
    target: tuple
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RuleDecl:
    lhs: App
    guard: tuple
    rhs: object
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class InterpDecl:
    name: str
    params: tuple
    current: tuple
    heat: nx.NatExpr
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ProgramAST:
    name: str
    sorts: tuple
    constructors: tuple
    functions: tuple
    rules: tuple
    interpretation: tuple | None = None


# -------------------------------------------------------------------- lexing

_TOK = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9']*)"
    r"|(?P<op>=>|<=|>=|!=|->|[()\[\],=<>:;*]))"
)


class Tok(NamedTuple):
    kind: str
    value: object
    line: int
    col: int


class _Source:
    """A logical item: physical lines joined, with a map back to positions."""

    def __init__(self, parts):
        self.parts = parts  # (offset, line, col, text)
        self.text = " ".join(p[3] for p in parts)
        off = 0
        fixed = []
        for _, line, col, text in parts:
            fixed.append((off, line, col, text))
            off += len(text) + 1
        self.parts = fixed

    @property
    def line(self) -> int:
        return self.parts[0][1]

    def where(self, offset: int) -> tuple[int, int]:
        for off, line, col, text in reversed(self.parts):
            if offset >= off:
                return line, col + offset - off
        return self.parts[0][1], self.parts[0][2]

    def error(self, msg: str, offset: int):
        return ProgramError(msg, *self.where(offset))

    def tokens(self, start: int = 0, end: int | None = None) -> list[Tok]:
        text = self.text if end is None else self.text[:end]
        pos = start
        out = []
        while True:
            m = _TOK.match(text, pos)
            if m is None:
                rest = text[pos:]
                if rest.strip():
                    off = pos + len(rest) - len(rest.lstrip())
                    raise self.error(f"unexpected character {text[off]!r}", off)
                break
            kind = m.lastgroup
            val = m.group(kind)
            if kind == "num":
                val = int(val)
            out.append(Tok(kind, val, *self.where(m.start(kind))))
            pos = m.end()
        end_at = self.where(len(text))
        out.append(Tok("end", None, *end_at))
        return out


def _logical_lines(text: str):
    """Yield (header?, _Source) pairs."""
    current = None
    base = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        if indent == 0:
            if current:
                yield current
            yield ("header", _Source([(0, no, 1, body)]))
            current, base = None, None
        elif current is not None and indent > base:
            current[1].parts.append((0, no, indent + 1, body))
            current = ("item", _Source(current[1].parts))
        else:
            if current:
                yield current
            current, base = ("item", _Source([(0, no, indent + 1, body)])), indent
    if current:
        yield current


# ------------------------------------------------------------------- parsing


class _Tokens:
    def __init__(self, src: _Source, toks: list[Tok]):
        self.src = src
        self.toks = toks
        self.i = 0

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind, value=None) -> bool:
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def take(self, kind=None, value=None) -> Tok:
        t = self.peek()
        if (kind and t.kind != kind) or (value is not None and t.value != value):
            want = repr(value) if value is not None else kind
            got = "end of line" if t.kind == "end" else repr(t.value)
            raise ProgramError(f"expected {want}, found {got}", t.line, t.col)
        self.i += 1
        return t

    def keyword(self, word) -> bool:
        return self.at("name", word)


def _parse_sort_list(ts: _Tokens, stop) -> tuple:
    if ts.at("op", "*"):
        ts.take()
        return ()
    out = []
    while ts.at("name") and not stop(ts):
        out.append(ts.take("name").value)
    return tuple(out)


def _parse_constructor(src: _Source) -> ConstructorDecl:
    ts = _Tokens(src, src.tokens())
    name = ts.take("name").value
    ts.take("op", ":")
    literal = False
    if ts.keyword("literal"):
        ts.take()
        literal = True
        source = ()
    else:
        source = _parse_sort_list(ts, lambda t: False)
    ts.take("op", "->")
    sort = ts.take("name").value
    a = None
    if ts.keyword("a"):
        ts.take()
        ts.take("op", "=")
        a = ts.take("num").value
    ts.take("end")
    return ConstructorDecl(name, source, sort, a, literal, src.line)


def _parse_function(src: _Source) -> FunctionDecl:
    ts = _Tokens(src, src.tokens())
    name = ts.take("name").value
    ts.take("op", ":")
    source = _parse_sort_list(ts, lambda t: False)
    ts.take("op", "->")
    target = _parse_sort_list(ts, lambda t: False)
    ts.take("end")
    return FunctionDecl(name, source, target, src.line)


def _parse_term(ts: _Tokens):
    t = ts.peek()
    pos = (t.line, t.col)
    if t.kind == "num":
        ts.take()
        return Num(t.value, pos)
    if t.kind == "op" and t.value == "(":
        ts.take()
        items = []
        if not ts.at("op", ")"):
            items.append(_parse_expr(ts))
            while ts.at("op", ","):
                ts.take()
                items.append(_parse_expr(ts))
        ts.take("op", ")")
        return Tup(tuple(items), pos)
    name = ts.take("name").value
    if name in ("let", "in", "when", "and"):
        raise ProgramError(f"unexpected keyword {name!r}", *pos)
    if ts.at("op", "["):
        ts.take()
        idx = ts.peek()
        if idx.kind not in ("num", "name"):
            raise ProgramError("expected a literal index or variable", idx.line, idx.col)
        ts.take()
        ts.take("op", "]")
        return Lit(name, idx.value, pos)
    if ts.at("op", "("):
        ts.take()
        args = []
        if not ts.at("op", ")"):
            args.append(_parse_expr(ts))
            while ts.at("op", ","):
                ts.take()
                args.append(_parse_expr(ts))
        ts.take("op", ")")
        return App(name, tuple(args), pos)
    return Name(name, pos)


def _parse_expr(ts: _Tokens):
    if ts.keyword("let"):
        t = ts.take()
        single = False
        if ts.at("op", "("):
            ts.take()
            names = []
            if not ts.at("op", ")"):
                names.append(ts.take("name").value)
                while ts.at("op", ","):
                    ts.take()
                    names.append(ts.take("name").value)
            ts.take("op", ")")
        else:
            names = [ts.take("name").value]
            single = True
        ts.take("op", "=")
        bound = _parse_expr(ts)
        if not ts.keyword("in"):
            t2 = ts.peek()
            raise ProgramError("expected 'in'", t2.line, t2.col)
        ts.take()
        body = _parse_expr(ts)
        return Let(tuple(names), bound, body, single, (t.line, t.col))
    return _parse_term(ts)


def _parse_operand(ts: _Tokens):
    t = ts.peek()
    if t.kind in ("num", "name"):
        ts.take()
        return t.value
    raise ProgramError("expected a literal variable or number", t.line, t.col)


def _parse_rule(src: _Source) -> RuleDecl:
    ts = _Tokens(src, src.tokens())
    lhs = _parse_term(ts)
    if isinstance(lhs, Name):
        lhs = App(lhs.id, (), lhs.pos)
    if not isinstance(lhs, App):
        raise ProgramError("a rule must start with a function application", *(lhs.pos or (src.line, 1)))
    guard = []
    if ts.keyword("when"):
        ts.take()
        while True:
            left = _parse_operand(ts)
            op = ts.peek()
            if op.kind != "op" or op.value not in ("<=", "<", "=", ">=", ">", "!="):
                raise ProgramError("expected a comparison", op.line, op.col)
            ts.take()
            right = _parse_operand(ts)
            guard.append(Cond(op.value, left, right))
            if not ts.keyword("and"):
                break
            ts.take()
    ts.take("op", "=>")
    rhs = _parse_expr(ts)
    ts.take("end")
    return RuleDecl(lhs, tuple(guard), rhs, src.line)


_INTERP = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9']*)\s*\(([^)]*)\)\s*:\s*current\b(.*?);\s*heat\b(.*)$")


def _parse_interp(src: _Source) -> InterpDecl:
    m = _INTERP.match(src.text)
    if m is None:
        raise src.error("expected 'f(i, j): current e, ...; heat e'", 0)
    name = m.group(1)
    params = tuple(p.strip() for p in m.group(2).split(",") if p.strip())
    for p in params:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", p):
            raise src.error(f"bad parameter name {p!r}", m.start(2))
    try:
        current = nx.parse_exprs(m.group(3), params)
    except nx.ExprSyntaxError as e:
        raise src.error(str(e), m.start(3) + e.pos) from None
    try:
        heat = nx.parse_expr(m.group(4), params)
    except nx.ExprSyntaxError as e:
        raise src.error(str(e), m.start(4) + e.pos) from None
    return InterpDecl(name, params, current, heat, src.line)


def parse_program(text: str) -> ProgramAST:
    """Parse the text of a program file into its syntax tree."""
    name = None
    sorts: list[str] = []
    parts = {"constructors": [], "functions": [], "rules": [], "interpretation": None}
    section = None
    for kind, src in _logical_lines(text):
        if kind == "header":
            words = src.text.split()
            head = words[0]
            if head not in SECTIONS:
                raise src.error(f"unknown section {head!r}", 0)
            section = head
            if head == "polygraph":
                if len(words) != 2:
                    raise src.error("expected 'polygraph NAME'", 0)
                name = words[1]
            elif head == "sorts":
                sorts.extend(words[1:])
            elif len(words) > 1:
                raise src.error(f"unexpected text after {head!r}", len(head) + 1)
            if head == "interpretation" and parts["interpretation"] is None:
                parts["interpretation"] = []
            continue
        if section is None or section == "polygraph":
            raise src.error("item outside of a section", 0)
        if section == "sorts":
            sorts.extend(src.text.split())
        elif section == "constructors":
            parts["constructors"].append(_parse_constructor(src))
        elif section == "functions":
            parts["functions"].append(_parse_function(src))
        elif section == "rules":
            parts["rules"].append(_parse_rule(src))
        else:
            parts["interpretation"].append(_parse_interp(src))
    if name is None:
        raise ProgramError("missing 'polygraph NAME' header", 1, 1)
    interp = parts["interpretation"]
    return ProgramAST(
        name, tuple(sorts), tuple(parts["constructors"]), tuple(parts["functions"]),
        tuple(parts["rules"]), tuple(interp) if interp is not None else None,
    )


# ------------------------------------------------------------------ printing


def format_expr(e) -> str:
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Lit):
        return f"{e.family}[{e.index}]"
    if isinstance(e, App):
        return f"{e.head}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Tup):
        return f"({', '.join(format_expr(a) for a in e.items)})"
    if isinstance(e, Let):
        names = e.names[0] if e.single else f"({', '.join(e.names)})"
        return f"let {names} = {format_expr(e.bound)} in {format_expr(e.body)}"
    raise TypeError(f"not an expression: {e!r}")


def _sorts(xs) -> str:
    return " ".join(xs) if xs else "*"


def format_rule(r: RuleDecl) -> str:
    head = format_expr(r.lhs) if r.lhs.args else r.lhs.head
    guard = ""
    if r.guard:
        guard = " when " + " and ".join(f"{c.left} {c.op} {c.right}" for c in r.guard)
    return f"{head}{guard} => {format_expr(r.rhs)}"


def format_program(ast: ProgramAST) -> str:
    """Print a syntax tree back to program text."""
    out = [f"polygraph {ast.name}", "", f"sorts {' '.join(ast.sorts)}", "", "constructors"]
    for c in ast.constructors:
        src = "literal" if c.literal else _sorts(c.source)
        a = f"  a={c.a}" if c.a is not None else ""
        out.append(f"  {c.name} : {src} -> {c.sort}{a}")
    out += ["", "functions"]
    for f in ast.functions:
        out.append(f"  {f.name} : {_sorts(f.source)} -> {_sorts(f.target)}")
    out += ["", "rules"]
    for r in ast.rules:
        out.append(f"  {format_rule(r)}")
    if ast.interpretation is not None:
        out += ["", "interpretation"]
        for d in ast.interpretation:
            cur = ", ".join(e.format(d.params) for e in d.current)
            out.append(f"  {d.name}({', '.join(d.params)}): current {cur}; heat {d.heat.format(d.params)}")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------- elaboration


def build_signature(ast: ProgramAST) -> Signature:
    cells = []
    for c in ast.constructors:
        cells.append(TwoCell(c.name, c.source, (c.sort,), Kind.CONSTRUCTOR, c.literal))
    for f in ast.functions:
        cells.append(TwoCell(f.name, f.source, f.target, Kind.FUNCTION))
    try:
        return Signature(ast.sorts, cells)
    except SignatureError as e:
        raise ElaborationError(str(e)) from None


def numeral_shape(sig: Signature, sort: str):
    """(zero, succ) if ``sort`` has exactly one nullary and one unary
    self-recursive constructor and nothing else, else None."""
    cs = sig.constructors(sort)
    if len(cs) != 2 or any(c.literal_family for c in cs):
        return None
    zero = [c for c in cs if not c.source]
    succ = [c for c in cs if c.source == (sort,)]
    if len(zero) == 1 and len(succ) == 1:
        return zero[0], succ[0]
    return None


def list_shape(sig: Signature, sort: str):
    """(nil, cons, element sort) for list-like sorts, else None."""
    cs = sig.constructors(sort)
    if len(cs) != 2:
        return None
    nil = [c for c in cs if not c.source]
    cons = [c for c in cs if len(c.source) == 2 and c.source[1] == sort and c.source[0] != sort]
    if len(nil) == 1 and len(cons) == 1:
        return nil[0], cons[0], cons[0].source[0]
    return None


WORD_PREFIX = "sym_"
BLANK = "_"


def word_shape(sig: Signature, sort: str):
    """(nil, {letter: cell}) when every other constructor is ``sym_<letter>``."""
    cs = sig.constructors(sort)
    nil = [c for c in cs if not c.source]
    letters = [c for c in cs if c.source == (sort,)]
    if len(nil) != 1 or len(nil) + len(letters) != len(cs) or not letters:
        return None
    table = {}
    for c in letters:
        if not c.name.startswith(WORD_PREFIX):
            return None
        sym = c.name[len(WORD_PREFIX):]
        sym = BLANK if sym == "blank" else sym
        if len(sym) != 1:
            return None
        table[sym] = c
    return nil[0], table


def letter_cell_name(sym: str) -> str:
    return WORD_PREFIX + ("blank" if sym == BLANK else sym)


class _Ctx:
    def __init__(self, sig: Signature, rule: RuleDecl):
        self.sig = sig
        self.rule = rule

    def err(self, msg, node=None):
        pos = getattr(node, "pos", None) or (self.rule.line, None)
        return ElaborationError(msg, *pos)

    def cell(self, name, node):
        c = self.sig.cells.get(name)
        if c is None:
            raise self.err(f"unknown cell {name!r}", node)
        return c


def _numeral_cells(ctx: _Ctx, sort: str, value: int, node):
    fam = ctx.sig.literal_family(sort)
    if fam is not None:
        return ("lit", fam)
    shape = numeral_shape(ctx.sig, sort)
    if shape is None:
        raise ctx.err(f"a number cannot denote a value of sort {sort}", node)
    return ("unary", shape)


def _lhs(ctx: _Ctx, lhs: App):
    """Variables (in order, with sorts), the anchor cell and a builder recipe."""
    fn = ctx.cell(lhs.head, lhs)
    if not fn.is_function:
        raise ctx.err(f"{fn.name} is not a function", lhs)
    if len(lhs.args) != len(fn.source):
        raise ctx.err(f"{fn.name} takes {len(fn.source)} arguments, got {len(lhs.args)}", lhs)
    variables: list[tuple[str, str]] = []
    lit_vars: set[str] = set()

    def scan(p, sort):
        if isinstance(p, Name):
            c = ctx.sig.cells.get(p.id)
            if c is not None and c.is_constructor and not c.source and not c.literal_family:
                if c.target[0] != sort:
                    raise ctx.err(f"{c.name} has sort {c.target[0]}, expected {sort}", p)
                return
            if c is not None:
                raise ctx.err(f"{p.id} cannot be used as a pattern variable", p)
            if any(v == p.id for v, _ in variables):
                raise ctx.err(f"variable {p.id} occurs twice in the left-hand side", p)
            variables.append((p.id, sort))
        elif isinstance(p, Num):
            _numeral_cells(ctx, sort, p.value, p)
        elif isinstance(p, Lit):
            c = ctx.cell(p.family, p)
            if not c.literal_family or c.target[0] != sort:
                raise ctx.err(f"{p.family} is not a literal family of sort {sort}", p)
            if isinstance(p.index, str):
                if p.index in lit_vars:
                    raise ctx.err(f"literal variable {p.index} occurs twice", p)
                lit_vars.add(p.index)
        elif isinstance(p, App):
            c = ctx.cell(p.head, p)
            if not c.is_constructor:
                raise ctx.err(f"only constructors may appear in patterns, not {c.name}", p)
            if c.target[0] != sort:
                raise ctx.err(f"{c.name} has sort {c.target[0]}, expected {sort}", p)
            if len(p.args) != len(c.source):
                raise ctx.err(f"{c.name} takes {len(c.source)} arguments, got {len(p.args)}", p)
            for a, s in zip(p.args, c.source):
                scan(a, s)
        else:
            raise ctx.err("unexpected form in a pattern", p)

    for a, s in zip(lhs.args, fn.source):
        scan(a, s)
    return fn, variables, lit_vars


def _build_closed(ctx: _Ctx, b: Builder, node, sort: str, value: int):
    kind, info = _numeral_cells(ctx, sort, value, node)
    if kind == "lit":
        return b.apply(info, [], value)[0]
    zero, succ = info
    h = b.apply(zero, [])[0]
    for _ in range(value):
        h = b.apply(succ, [h])[0]
    return h


def _lhs_diagram(ctx: _Ctx, fn: TwoCell, lhs: App, variables):
    b = Builder([s for _, s in variables])
    env = {v: h for (v, _), h in zip(variables, b.inputs)}

    def build(p, sort):
        if isinstance(p, Name):
            if p.id in env:
                return env[p.id]
            return b.apply(ctx.sig.cells[p.id], [])[0]
        if isinstance(p, Num):
            return _build_closed(ctx, b, p, sort, p.value)
        if isinstance(p, Lit):
            return b.apply(ctx.sig.cells[p.family], [], p.index)[0]
        c = ctx.sig.cells[p.head]
        return b.apply(c, [build(a, s) for a, s in zip(p.args, c.source)])[0]

    hs = [build(a, s) for a, s in zip(lhs.args, fn.source)]
    outs = b.apply(fn, hs)
    return b.diagram(outs)


def _rhs_diagram(ctx: _Ctx, fn: TwoCell, rhs, variables, lit_vars):
    b = Builder([s for _, s in variables])
    env: dict[str, object] = {v: h for (v, _), h in zip(variables, b.inputs)}
    used: set[str] = set()
    where: dict[str, object] = {}

    def use(node):
        name = node.id
        if name in used:
            raise ctx.err(f"variable {name} is used twice (duplicate it with dup)", node)
        used.add(name)
        return env[name]

    def elab(e, expected: Sequence[str] | None) -> list:
        if isinstance(e, Name):
            if e.id in env:
                return [use(e)]
            c = ctx.sig.cells.get(e.id)
            if c is None:
                raise ctx.err(f"unknown variable or cell {e.id!r}", e)
            if c.source or c.literal_family:
                raise ctx.err(f"{c.name} needs arguments", e)
            return b.apply(c, [])
        if isinstance(e, Num):
            if not expected:
                raise ctx.err("cannot tell the sort of this number", e)
            return [_build_closed(ctx, b, e, expected[0], e.value)]
        if isinstance(e, Lit):
            c = ctx.cell(e.family, e)
            if not c.literal_family:
                raise ctx.err(f"{c.name} is not a literal family", e)
            if isinstance(e.index, str) and e.index not in lit_vars:
                raise ctx.err(f"literal variable {e.index} is not bound by the left-hand side", e)
            return b.apply(c, [], e.index)
        if isinstance(e, Tup):
            out = []
            for item in e.items:
                sub = None if expected is None else expected[len(out):]
                out += elab(item, sub)
            return out
        if isinstance(e, Let):
            got = elab(e.bound, None)
            if len(got) != len(e.names):
                raise ctx.err(f"binding {len(e.names)} names to {len(got)} values", e)
            for n, h in zip(e.names, got):
                if n in env or n in KEYWORDS:
                    raise ctx.err(f"name {n} is already bound", e)
                env[n] = h
                where[n] = e
            return elab(e.body, expected)
        if isinstance(e, App):
            if e.head in ("dup", "erase"):
                if len(e.args) != 1:
                    raise ctx.err(f"{e.head} takes one argument", e)
                hs = elab(e.args[0], None)
                if len(hs) != 1:
                    raise ctx.err(f"{e.head} takes a single wire", e)
                sort = b.sort_of(hs[0])
                cell = ctx.sig.delta(sort) if e.head == "dup" else ctx.sig.eps(sort)
                return b.apply(cell, hs)
            c = ctx.cell(e.head, e)
            if c.literal_family:
                raise ctx.err(f"write {c.name}[n] for a literal", e)
            hs: list = []
            for a in e.args:
                hs += elab(a, c.source[len(hs):])
            if len(hs) != len(c.source):
                raise ctx.err(f"{c.name} takes {len(c.source)} inputs, got {len(hs)}", e)
            for i, (h, s) in enumerate(zip(hs, c.source)):
                if b.sort_of(h) != s:
                    raise ctx.err(f"argument {i + 1} of {c.name} has sort {b.sort_of(h)}, expected {s}", e)
            return b.apply(c, hs)
        raise ctx.err("unexpected expression", e)

    outs = elab(rhs, fn.target)
    got = tuple(b.sort_of(h) for h in outs)
    if got != fn.target:
        raise ctx.err(f"right-hand side has type {_sorts(got)}, expected {_sorts(fn.target)}", rhs)
    unused = [n for n in env if n not in used]
    if unused:
        n = unused[0]
        raise ctx.err(f"variable {n} is never used (discard it with erase)", where.get(n, rhs))
    try:
        return b.diagram(outs)
    except TypeMismatch as exc:
        raise ctx.err(str(exc), rhs) from None


def elaborate_rule(sig: Signature, r: RuleDecl, name: str) -> Rule:
    ctx = _Ctx(sig, r)
    fn, variables, lit_vars = _lhs(ctx, r.lhs)
    lhs = _lhs_diagram(ctx, fn, r.lhs, variables)
    rhs = _rhs_diagram(ctx, fn, r.rhs, variables, lit_vars)
    guard = tuple(Comparison(c.op, c.left, c.right) for c in r.guard)
    try:
        return Rule(name, lhs, rhs, guard=guard)
    except RuleError as e:
        raise ElaborationError(str(e), r.line) from None


def elaborate(ast: ProgramAST) -> tuple[Program, Interpretation | None]:
    """Turn a syntax tree into a program and its interpretation (if given)."""
    sig = build_signature(ast)
    counts: dict[str, int] = {}
    rules = []
    for r in ast.rules:
        counts[r.lhs.head] = counts.get(r.lhs.head, 0) + 1
        rules.append(elaborate_rule(sig, r, f"{r.lhs.head}_{counts[r.lhs.head]}"))
    try:
        program = Program(ast.name, sig, rules)
    except RuleError as e:
        raise ElaborationError(str(e)) from None
    if ast.interpretation is None:
        return program, None
    fns = {}
    for d in ast.interpretation:
        c = sig.cells.get(d.name)
        if c is None or not c.is_function:
            raise ElaborationError(f"{d.name} is not a function", d.line)
        if len(d.params) != len(c.source):
            raise ElaborationError(f"{d.name} has {len(c.source)} inputs, got {len(d.params)} names", d.line)
        if len(d.current) != len(c.target):
            raise ElaborationError(f"{d.name} has {len(c.target)} outputs, got {len(d.current)} currents", d.line)
        if d.name in fns:
            raise ElaborationError(f"{d.name} is interpreted twice", d.line)
        fns[d.name] = CellInterp(d.current, d.heat)
    consts = {c.name: (c.a if c.a is not None else 1) for c in ast.constructors}
    return program, Interpretation(program, fns, consts)


class Loaded(NamedTuple):
    program: Program
    interpretation: Interpretation | None
    ast: ProgramAST


def load(text: str) -> Loaded:
    ast = parse_program(text)
    program, interp = elaborate(ast)
    return Loaded(program, interp, ast)


def load_file(path) -> Loaded:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read())


# -------------------------------------------------------------------- values


def _term_from_expr(sig: Signature, e, sort: str) -> Term:
    pos = getattr(e, "pos", None) or (None, None)
    if isinstance(e, Num):
        fam = sig.literal_family(sort)
        if fam is not None:
            return Term(fam, e.value)
        shape = numeral_shape(sig, sort)
        if shape is None:
            raise ProgramError(f"a number cannot denote a value of sort {sort}", *pos)
        t = Term(shape[0])
        for _ in range(e.value):
            t = Term(shape[1], None, (t,))
        return t
    if isinstance(e, Lit):
        c = sig.cells.get(e.family)
        if c is None or not c.literal_family or c.target[0] != sort or not isinstance(e.index, int):
            raise ProgramError(f"{e.family}[{e.index}] is not a literal of sort {sort}", *pos)
        return Term(c, e.index)
    name = e.id if isinstance(e, Name) else e.head if isinstance(e, App) else None
    if name is None:
        raise ProgramError("expected a value", *pos)
    c = sig.cells.get(name)
    if c is None or not c.is_constructor:
        raise ProgramError(f"{name} is not a constructor", *pos)
    if c.target[0] != sort:
        raise ProgramError(f"{name} has sort {c.target[0]}, expected {sort}", *pos)
    args = e.args if isinstance(e, App) else ()
    if len(args) != len(c.source):
        raise ProgramError(f"{name} takes {len(c.source)} arguments", *pos)
    return Term(c, None, tuple(_term_from_expr(sig, a, s) for a, s in zip(args, c.source)))


def _split_items(body: str) -> list[str]:
    items, depth, cur = [], 0, []
    for ch in body:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        items.append("".join(cur))
    return items


def parse_value(text: str, sort: str, sig: Signature) -> Term:
    """Read a value of ``sort``.

    Numbers denote literals or unary numerals, ``[a, b]`` a list and
    ``"ab"`` (or ``'ab'``) a word; any constructor term is accepted too.
    """
    s = text.strip()
    if s.startswith("[") and s.endswith("]"):
        shape = list_shape(sig, sort)
        if shape is None:
            raise ProgramError(f"sort {sort} is not a list sort")
        nil, cons, elem = shape
        t = Term(nil)
        for item in reversed(_split_items(s[1:-1])):
            t = Term(cons, None, (parse_value(item, elem, sig), t))
        return t
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "\"'":
        shape = word_shape(sig, sort)
        if shape is None:
            raise ProgramError(f"sort {sort} is not a word sort")
        nil, table = shape
        t = Term(nil)
        for ch in reversed(s[1:-1]):
            if ch not in table:
                raise ProgramError(f"{ch!r} is not a letter of sort {sort}")
            t = Term(table[ch], None, (t,))
        return t
    src = _Source([(0, 1, 1, s)])
    ts = _Tokens(src, src.tokens())
    e = _parse_term(ts)
    ts.take("end")
    return _term_from_expr(sig, e, sort)


def format_value(t: Term, sig: Signature | None = None) -> str:
    """Sort-directed printing: numerals as numbers, lists in brackets, words quoted."""
    if sig is None:
        return str(t)
    sort = t.cell.target[0]
    if t.cell.literal_family:
        return str(t.literal)
    shape = numeral_shape(sig, sort)
    if shape is not None:
        n = 0
        while t.args:
            n += 1
            t = t.args[0]
        return str(n)
    shape = list_shape(sig, sort)
    if shape is not None:
        items = []
        while t.args:
            items.append(format_value(t.args[0], sig))
            t = t.args[1]
        return "[" + ",".join(items) + "]"
    shape = word_shape(sig, sort)
    if shape is not None:
        names = {c.name: k for k, c in shape[1].items()}
        out = []
        while t.args:
            out.append(names[t.cell.name])
            t = t.args[0]
        return '"' + "".join(out) + '"'
    if not t.args:
        return t.cell.name
    return f"{t.cell.name}({', '.join(format_value(a, sig) for a in t.args)})"
