"""Monotone expressions over the natural numbers.

The grammar has variables, constants, sums, products, integer powers,
``max`` and division by a positive constant rounded up or down.  Every
construct is monotone, so an expression always denotes a monotone map
N^m -> N.

Expressions can be normalized into a polynomial over *atoms*, where an atom
is either a variable or an irreducible ``max``/``floor`` term.  Two
expressions are considered symbolically equal when their normal forms
coincide.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at column {pos + 1})")
        self.pos = pos


class NatExpr:
    """Base class.  Subclasses are immutable and hashable."""

    __slots__ = ()

    def __add__(self, other):
        return Add((self, lift(other)))

    def __radd__(self, other):
        return Add((lift(other), self))

    def __mul__(self, other):
        return Mul((self, lift(other)))

    def __rmul__(self, other):
        return Mul((lift(other), self))

    def __pow__(self, k: int):
        return Pow(self, k)

    def eval(self, env: Sequence[int]) -> int:
        raise NotImplementedError

    def subst(self, args: Sequence["NatExpr"]) -> "NatExpr":
        raise NotImplementedError

    def variables(self) -> frozenset[int]:
        raise NotImplementedError

    def format(self, names: Sequence[str] | None = None) -> str:
        return _fmt(self, names, 0)

    def __str__(self):
        return self.format()

    def compile(self) -> Callable[[Sequence[int]], int]:
        """Return a fast evaluator taking a sequence of naturals."""
        return eval("lambda a: " + _py(self), {"max": max})  # noqa: S307

    def normal(self) -> "NatExpr":
        return from_poly(to_poly(self))


@dataclass(frozen=True)
class Var(NatExpr):
    index: int

    def eval(self, env):
        return env[self.index]

    def subst(self, args):
        return args[self.index]

    def variables(self):
        return frozenset((self.index,))


@dataclass(frozen=True)
class Const(NatExpr):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("constants must be natural numbers")

    def eval(self, env):
        return self.value

    def subst(self, args):
        return self

    def variables(self):
        return frozenset()


@dataclass(frozen=True)
class Add(NatExpr):
    terms: tuple

    def eval(self, env):
        return sum(t.eval(env) for t in self.terms)

    def subst(self, args):
        return Add(tuple(t.subst(args) for t in self.terms))

    def variables(self):
        return frozenset().union(*(t.variables() for t in self.terms))


@dataclass(frozen=True)
class Mul(NatExpr):
    factors: tuple

    def eval(self, env):
        r = 1
        for f in self.factors:
            r *= f.eval(env)
        return r

    def subst(self, args):
        return Mul(tuple(f.subst(args) for f in self.factors))

    def variables(self):
        return frozenset().union(*(f.variables() for f in self.factors))


@dataclass(frozen=True)
class Pow(NatExpr):
    base: NatExpr
    exp: int

    def __post_init__(self):
        if self.exp < 0:
            raise ValueError("exponents must be natural numbers")

    def eval(self, env):
        return self.base.eval(env) ** self.exp

    def subst(self, args):
        return Pow(self.base.subst(args), self.exp)

    def variables(self):
        return self.base.variables()


@dataclass(frozen=True)
class Max(NatExpr):
    args: tuple

    def eval(self, env):
        return max(a.eval(env) for a in self.args)

    def subst(self, args):
        return Max(tuple(a.subst(args) for a in self.args))

    def variables(self):
        return frozenset().union(*(a.variables() for a in self.args))


@dataclass(frozen=True)
class Div(NatExpr):
    """``ceil(arg/divisor)`` when ``up`` is set, ``floor(arg/divisor)`` otherwise."""

    arg: NatExpr
    divisor: int
    up: bool = False

    def __post_init__(self):
        if self.divisor < 1:
            raise ValueError("divisor must be at least 1")

    def eval(self, env):
        v = self.arg.eval(env)
        return -(-v // self.divisor) if self.up else v // self.divisor

    def subst(self, args):
        return Div(self.arg.subst(args), self.divisor, self.up)

    def variables(self):
        return self.arg.variables()


ZERO = Const(0)
ONE = Const(1)


def lift(x) -> NatExpr:
    if isinstance(x, NatExpr):
        return x
    if isinstance(x, int) and x >= 0:
        return Const(x)
    raise TypeError(f"cannot use {x!r} as a natural-number expression")


def var(i: int) -> Var:
    return Var(i)


def ceil_div(e, c: int) -> Div:
    return Div(lift(e), c, True)


def floor_div(e, c: int) -> Div:
    return Div(lift(e), c, False)


def emax(*args) -> NatExpr:
    return Max(tuple(lift(a) for a in args))


def esum(items) -> NatExpr:
    items = tuple(lift(i) for i in items)
    if not items:
        return ZERO
    return items[0] if len(items) == 1 else Add(items)


# ---------------------------------------------------------------- printing

_PREC = {Add: 1, Mul: 2, Pow: 3}


def default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def _vname(i: int, names) -> str:
    if names is not None and i < len(names):
        return names[i]
    return default_names(max(i + 1, 3))[i] if i < 3 else f"x{i + 1}"


def _fmt(e: NatExpr, names, prec: int) -> str:
    if isinstance(e, Var):
        return _vname(e.index, names)
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Add):
        s = " + ".join(_fmt(t, names, 2 if isinstance(t, Add) else 1) for t in e.terms)
        return f"({s})" if prec > 1 else s
    if isinstance(e, Mul):
        s = "*".join(_fmt(f, names, 3 if isinstance(f, Mul) else 2) for f in e.factors)
        return f"({s})" if prec > 2 else s
    if isinstance(e, Pow):
        return f"{_fmt(e.base, names, 4)}^{e.exp}"
    if isinstance(e, Max):
        return "max(" + ", ".join(_fmt(a, names, 0) for a in e.args) + ")"
    if isinstance(e, Div):
        fn = "ceil" if e.up else "floor"
        return f"{fn}({_fmt(e.arg, names, 2)}/{e.divisor})"
    raise TypeError(e)


def _py(e: NatExpr) -> str:
    if isinstance(e, Var):
        return f"a[{e.index}]"
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Add):
        return "(" + " + ".join(_py(t) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(_py(f) for f in e.factors) + ")"
    if isinstance(e, Pow):
        return f"({_py(e.base)} ** {e.exp})"
    if isinstance(e, Max):
        return "max(" + ", ".join(_py(a) for a in e.args) + ")"
    if isinstance(e, Div):
        if e.up:
            return f"(-(-{_py(e.arg)} // {e.divisor}))"
        return f"({_py(e.arg)} // {e.divisor})"
    raise TypeError(e)


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            out.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2):
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            out.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, names: Mapping[str, int]):
        self.toks = _tokens(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] if tok[0] != "end" else "end of expression"
            raise ExprSyntaxError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        terms = [self.term()]
        while self.peek()[:2] == ("op", "+"):
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self):
        factors = [self.power()]
        while self.peek()[:2] == ("op", "*"):
            self.take()
            factors.append(self.power())
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Pow(base, self.take("num")[1])
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(val)
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        if kind == "name":
            self.take()
            if val in ("ceil", "floor"):
                self.take("op", "(")
                e = self.expr()
                self.take("op", "/")
                c = self.take("num")[1]
                if c < 1:
                    raise ExprSyntaxError("divisor must be positive", pos)
                self.take("op", ")")
                return Div(e, c, val == "ceil")
            if val == "max":
                self.take("op", "(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.take("op", ")")
                return Max(tuple(args))
            if val not in self.names:
                raise ExprSyntaxError(f"unknown variable {val!r}", pos)
            return Var(self.names[val])
        raise ExprSyntaxError(f"unexpected {val!r}" if val else "unexpected end", pos)


def parse_expr(text: str, names: Sequence[str] = ()) -> NatExpr:
    """Parse ``text`` with the given variable names bound to indices 0, 1, ..."""
    p = _Parser(text, {n: i for i, n in enumerate(names)})
    e = p.expr()
    p.take("end")
    return e


def parse_exprs(text: str, names: Sequence[str] = ()) -> tuple[NatExpr, ...]:
    """Parse a comma-separated list of expressions (possibly empty)."""
    if not text.strip():
        return ()
    p = _Parser(text, {n: i for i, n in enumerate(names)})
    out = [p.expr()]
    while p.peek()[:2] == ("op", ","):
        p.take()
        out.append(p.expr())
    p.take("end")
    return tuple(out)


# ---------------------------------------------------------- normalization
#
# A polynomial is a dict mapping monomials to positive coefficients.  A
# monomial is a sorted tuple of (atom, exponent) pairs; atoms are Var or
# normalized Max/Div terms (Div always in floor form).


def _akey(atom):
    if isinstance(atom, Var):
        return (0, atom.index, "")
    return (1, 0, repr(atom))


def _pmul(p, q):
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            exps = dict(m1)
            for a, k in m2:
                exps[a] = exps.get(a, 0) + k
            m = tuple(sorted(exps.items(), key=lambda ak: _akey(ak[0])))
            out[m] = out.get(m, 0) + c1 * c2
    return out


def _padd(p, q):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + c
    return out


def _const_poly(c: int):
    return {(): c} if c else {}


def to_poly(e: NatExpr) -> dict:
    p = _to_poly(e)
    return _hermite(p)


def _to_poly(e: NatExpr) -> dict:
    if isinstance(e, Var):
        return {((e, 1),): 1}
    if isinstance(e, Const):
        return _const_poly(e.value)
    if isinstance(e, Add):
        out: dict = {}
        for t in e.terms:
            out = _padd(out, _to_poly(t))
        return out
    if isinstance(e, Mul):
        out = {(): 1}
        for f in e.factors:
            out = _pmul(out, _to_poly(f))
        return out
    if isinstance(e, Pow):
        base = _to_poly(e.base)
        out = {(): 1}
        for _ in range(e.exp):
            out = _pmul(out, base)
        return out
    if isinstance(e, Max):
        polys = []
        for a in e.args:
            q = to_poly(a)
            if q not in polys:
                polys.append(q)
        # drop arguments dominated coefficient-wise (valid since atoms are >= 0)
        keep = [q for q in polys if not any(r is not q and _dominates(r, q) for r in polys)]
        if len(keep) == 1:
            return keep[0]
        args = tuple(sorted((from_poly(q) for q in keep), key=repr))
        return {((Max(args), 1),): 1}
    if isinstance(e, Div):
        q = to_poly(e.arg)
        if e.up:
            q = _padd(q, _const_poly(e.divisor - 1))
        c = e.divisor
        if c == 1:
            return q
        if all(v % c == 0 for v in q.values()):
            return {m: v // c for m, v in q.items()}
        return {((Div(from_poly(q), c, False), 1),): 1}
    raise TypeError(e)


def _dominates(p, q) -> bool:
    return all(p.get(m, 0) >= v for m, v in q.items())


def _split_const(p):
    rest = {m: v for m, v in p.items() if m}
    return rest, p.get((), 0)


def _hermite(p: dict) -> dict:
    """Apply sum_{t<c} floor((E+k+t)/c) = E+k to linear floor atoms."""
    groups: dict = {}
    for m, coeff in p.items():
        if len(m) == 1 and m[0][1] == 1 and isinstance(m[0][0], Div):
            atom = m[0][0]
            inner, k = _split_const(to_poly(atom.arg))
            key = (tuple(sorted(inner.items(), key=repr)), atom.divisor)
            groups.setdefault(key, {})[k] = (m, coeff)
    changed = False
    p = dict(p)
    for (inner_items, c), by_offset in groups.items():
        inner = dict(inner_items)
        for start in sorted(by_offset):
            run = [start + t for t in range(c)]
            if not all(k in by_offset and p.get(by_offset[k][0], 0) > 0 for k in run):
                continue
            r = min(p[by_offset[k][0]] for k in run)
            for k in run:
                m = by_offset[k][0]
                p[m] -= r
                if not p[m]:
                    del p[m]
            p = _padd(p, {m: v * r for m, v in _padd(inner, _const_poly(start)).items()})
            changed = True
    return _hermite(p) if changed else p


def _mono_expr(m) -> NatExpr | None:
    factors = []
    for atom, k in m:
        factors.append(atom if k == 1 else Pow(atom, k))
    if not factors:
        return None
    return factors[0] if len(factors) == 1 else Mul(tuple(factors))


def _mono_order(m):
    degree = sum(k for _, k in m)
    return (-degree, [(_akey(a), -k) for a, k in m])


def from_poly(p: dict) -> NatExpr:
    terms = []
    for m in sorted(p, key=_mono_order):
        c = p[m]
        body = _mono_expr(m)
        if body is None:
            terms.append(Const(c))
        elif c == 1:
            terms.append(body)
        else:
            fs = body.factors if isinstance(body, Mul) else (body,)
            terms.append(Mul((Const(c),) + tuple(fs)))
    if not terms:
        return ZERO
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def normalize(e: NatExpr) -> NatExpr:
    return from_poly(to_poly(e))


def equivalent(a: NatExpr, b: NatExpr) -> bool:
    """Symbolic equality up to commutative normalization."""
    return to_poly(a) == to_poly(b)


def is_polynomial(e: NatExpr) -> bool:
    """True when the normal form has only variables as atoms."""
    return all(isinstance(a, Var) for m in to_poly(e) for a, _ in m)


def is_zero(e: NatExpr) -> bool:
    return not to_poly(e)
