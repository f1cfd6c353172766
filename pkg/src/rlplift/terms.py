"""Terms, atoms and substitutions shared by the knowledge base and the RLP language.

Ground terms use plain Python values where possible:

* a symbolic constant is a ``str`` (``"anna"``),
* a number is a :class:`fractions.Fraction`,
* a structured term is a :class:`Compound`.

Non-ground terms add :class:`Var` and :class:`Arith` (arithmetic that is
evaluated once its operands are bound).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping

ANON = "_"


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    @property
    def anonymous(self) -> bool:
        return self.name.startswith("_")

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple

    def __repr__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Arith:
    op: str
    lhs: Any
    rhs: Any

    def __repr__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def __repr__(self) -> str:
        return format_atom(self)


class TermError(ValueError):
    pass


def is_number(t) -> bool:
    return isinstance(t, Fraction)


def is_ground(t) -> bool:
    if isinstance(t, (str, Fraction)):
        return True
    if isinstance(t, Var):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, Arith):
        return False
    raise TypeError(f"not a term: {t!r}")


def term_vars(t, out: list | None = None) -> list[Var]:
    """Variables of ``t`` in order of first occurrence (anonymous ones included)."""
    if out is None:
        out = []
    if isinstance(t, Var):
        if t not in out:
            out.append(t)
    elif isinstance(t, Compound):
        for a in t.args:
            term_vars(a, out)
    elif isinstance(t, Arith):
        term_vars(t.lhs, out)
        term_vars(t.rhs, out)
    return out


def atom_vars(atom: Atom, out: list | None = None) -> list[Var]:
    if out is None:
        out = []
    for a in atom.args:
        term_vars(a, out)
    return out


def named_vars(vs: Iterable[Var]) -> list[Var]:
    return [v for v in vs if not v.anonymous]


_OPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}


def substitute(t, theta: Mapping[Var, Any]):
    """Apply ``theta`` to ``t``; arithmetic with numeric operands is folded."""
    if isinstance(t, Var):
        return theta.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(substitute(a, theta) for a in t.args))
    if isinstance(t, Arith):
        lhs = substitute(t.lhs, theta)
        rhs = substitute(t.rhs, theta)
        if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
            if t.op == "/" and rhs == 0:
                raise TermError(f"division by zero in {format_term(t)}")
            return _OPS[t.op](lhs, rhs)
        if is_ground(lhs) and is_ground(rhs):
            raise TermError(f"arithmetic on non-numeric terms: {format_term(Arith(t.op, lhs, rhs))}")
        return Arith(t.op, lhs, rhs)
    return t


def substitute_atom(atom: Atom, theta: Mapping[Var, Any]) -> Atom:
    return Atom(atom.pred, tuple(substitute(a, theta) for a in atom.args))


def evaluate_arith(t, theta: Mapping[Var, Any] = {}) -> Fraction:
    v = substitute(t, theta)
    if not isinstance(v, Fraction):
        raise TermError(f"expected a number, got {format_term(v)}")
    return v


def match(pattern, ground, theta: dict) -> dict | None:
    """One-way matching of ``pattern`` against a ground term; extends a copy of ``theta``."""
    if isinstance(pattern, Var):
        if pattern.name == ANON:
            return theta
        bound = theta.get(pattern)
        if bound is None:
            theta = dict(theta)
            theta[pattern] = ground
            return theta
        return theta if bound == ground else None
    if isinstance(pattern, Compound):
        if not isinstance(ground, Compound) or ground.functor != pattern.functor \
                or len(ground.args) != len(pattern.args):
            return None
        for p, g in zip(pattern.args, ground.args):
            theta = match(p, g, theta)
            if theta is None:
                return None
        return theta
    if isinstance(pattern, Arith):
        try:
            v = substitute(pattern, theta)
        except TermError:
            return None
        if isinstance(v, Arith):
            raise TermError(f"arithmetic term {format_term(pattern)} is not bound")
        return theta if v == ground else None
    return theta if pattern == ground else None


def match_args(patterns: tuple, grounds: tuple, theta: dict) -> dict | None:
    for p, g in zip(patterns, grounds):
        theta = match(p, g, theta)
        if theta is None:
            return None
    return theta


def subsumes(general, specific) -> bool:
    """True if ``specific`` is an instance of ``general`` (variables of ``specific`` are frozen)."""
    return _subsume(general, specific, {}) is not None


def _subsume(g, s, theta):
    if isinstance(g, Var):
        if g.name == ANON:
            return theta
        if g in theta:
            return theta if theta[g] == s else None
        theta = dict(theta)
        theta[g] = s
        return theta
    if isinstance(g, Compound):
        if not isinstance(s, Compound) or s.functor != g.functor or len(s.args) != len(g.args):
            return None
        for a, b in zip(g.args, s.args):
            theta = _subsume(a, b, theta)
            if theta is None:
                return None
        return theta
    return theta if g == s else None


def rename(t, mapping: dict[Var, Var]):
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(rename(a, mapping) for a in t.args))
    if isinstance(t, Arith):
        return Arith(t.op, rename(t.lhs, mapping), rename(t.rhs, mapping))
    return t


# Deterministic total order on ground terms: numbers < symbols < compounds.
def term_key(t):
    if isinstance(t, Fraction):
        return (0, t)
    if isinstance(t, str):
        return (1, t)
    if isinstance(t, Compound):
        return (2, t.functor, len(t.args), tuple(term_key(a) for a in t.args))
    raise TypeError(f"cannot order non-ground term {t!r}")


def atom_key(a: Atom):
    return (a.pred, len(a.args), tuple(term_key(t) for t in a.args))


def format_number(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    # terminating decimals print as decimals, everything else as an exact ratio
    d = v.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    sign = "-" if v < 0 else ""
    num = abs(v)
    scale = 0
    while (num * 10**scale).denominator != 1:
        scale += 1
    digits = str((num * 10**scale).numerator).rjust(scale + 1, "0")
    return f"{sign}{digits[:-scale]}.{digits[-scale:]}"


_ANON_RE = re.compile(r"^_\d+$")
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_term(t, prec: int = 0) -> str:
    if isinstance(t, Var):
        return "_" if _ANON_RE.match(t.name) else t.name
    if isinstance(t, str):
        return t
    if isinstance(t, Fraction):
        s = format_number(t)
        return f"({s})" if (t < 0 or "/" in s) and prec > 0 else s
    if isinstance(t, Compound):
        return f"{t.functor}({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, Arith):
        p = _PREC[t.op]
        s = f"{format_term(t.lhs, p)} {t.op} {format_term(t.rhs, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(f"not a term: {t!r}")


def format_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({', '.join(format_term(t) for t in a.args)})"


def iter_subterms(t) -> Iterator:
    yield t
    if isinstance(t, Compound):
        for a in t.args:
            yield from iter_subterms(a)
    elif isinstance(t, Arith):
        yield from iter_subterms(t.lhs)
        yield from iter_subterms(t.rhs)
