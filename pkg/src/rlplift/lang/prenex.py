"""Macro expansion of definitions and normalization into prenex form.

A par-expression in prenex form is a signed sum of monomials; each monomial
is a chain of sum quantifiers around a sum-free product::

    sum{q1} sum<q2> coef * f1 * ... * fk / d1 / ...

The factors are atom references (at most one LP variable per monomial); the
divisors are parameter-only expressions evaluated at grounding time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..terms import Var
from .ast import (
    BinOp, Constraint, Neg, Num, Objective, Ref, RlpModel, Sum, expr_vars, query_vars,
    rename_expr, substitute_expr,
)


class PrenexError(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    quants: tuple = ()   # ((mode, query), ...) outermost first
    coef: Fraction = Fraction(1)
    factors: tuple = ()  # Ref nodes
    divisors: tuple = ()  # parameter-only expressions
    locals: frozenset = frozenset()  # variables introduced by the quantifiers

    def names(self) -> set[str]:
        out = {v.name for _, q in self.quants for v in query_vars(q)}
        for f in self.factors + self.divisors:
            out.update(v.name for v in expr_vars(f))
        return out

    def renamed(self, mapping: dict[Var, Var]) -> "Monomial":
        if not mapping:
            return self
        quants = tuple((mode, _rename_query(q, mapping)) for mode, q in self.quants)
        return Monomial(quants, self.coef,
                        tuple(rename_expr(f, mapping) for f in self.factors),
                        tuple(rename_expr(d, mapping) for d in self.divisors),
                        frozenset(mapping.get(v, v) for v in self.locals))


def _rename_query(q, mapping):
    return rename_expr(Sum("set", q, Num(Fraction(0))), mapping).query


class _Names:
    def __init__(self, taken):
        self.taken = set(taken)

    def fresh(self, base: Var) -> Var:
        stem = base.name.rstrip("0123456789").rstrip("_") or "V"
        i = 1
        while f"{stem}_{i}" in self.taken:
            i += 1
        name = f"{stem}_{i}"
        self.taken.add(name)
        return Var(name)


# ---------------------------------------------------------------------------
# macro expansion

def inline(expr, definitions: dict, names: _Names, stack: tuple = ()):
    """Replace references to defined predicates by their (renamed) bodies."""
    if isinstance(expr, Ref):
        d = definitions.get(expr.atom.key)
        if d is None:
            return expr
        if expr.atom.key in stack:
            chain = " -> ".join(f"{p}/{k}" for p, k in stack + (expr.atom.key,))
            raise PrenexError(f"recursive definition: {chain}")
        head_vars = list(d.head.args)
        theta: dict = {}
        for hv, arg in zip(head_vars, expr.atom.args):
            theta[hv] = arg
        # the body's own variables get fresh names so they cannot capture the caller's
        mapping = {}
        for v in expr_vars(d.body):
            if v in theta or v.anonymous:
                continue
            if v.name in names.taken:
                mapping[v] = names.fresh(v)
            else:
                names.taken.add(v.name)
        body = rename_expr(d.body, mapping)
        body = substitute_expr(body, theta)
        return inline(body, definitions, names, stack + (expr.atom.key,))
    if isinstance(expr, Neg):
        return Neg(inline(expr.expr, definitions, names, stack))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, inline(expr.lhs, definitions, names, stack),
                     inline(expr.rhs, definitions, names, stack))
    if isinstance(expr, Sum):
        return Sum(expr.mode, expr.query, inline(expr.body, definitions, names, stack))
    return expr


# ---------------------------------------------------------------------------
# normalization

def monomials(expr, scope: frozenset, names: _Names) -> list[Monomial]:
    if isinstance(expr, Num):
        return [Monomial(coef=expr.value)] if expr.value != 0 else []
    if isinstance(expr, Ref):
        return [Monomial(factors=(expr,))]
    if isinstance(expr, Neg):
        return [_scale(m, -1) for m in monomials(expr.expr, scope, names)]
    if isinstance(expr, BinOp):
        left = monomials(expr.lhs, scope, names)
        if expr.op == "+":
            return left + monomials(expr.rhs, scope, names)
        if expr.op == "-":
            return left + [_scale(m, -1) for m in monomials(expr.rhs, scope, names)]
        if expr.op == "*":
            right = monomials(expr.rhs, scope, names)
            return [_product(a, b, names) for a in left for b in right]
        if expr.op == "/":
            if isinstance(expr.rhs, Num):
                if expr.rhs.value == 0:
                    raise PrenexError("division by zero")
                return [_scale(m, 1 / expr.rhs.value) for m in left]
            return [_divide(m, expr.rhs, names) for m in left]
    if isinstance(expr, Sum):
        bound = {v for v in query_vars(expr.query) if not v.anonymous}
        introduced = frozenset(bound - scope)
        body = monomials(expr.body, scope | bound, names)
        return [Monomial(((expr.mode, expr.query),) + m.quants, m.coef, m.factors,
                         m.divisors, introduced | m.locals) for m in body]
    raise TypeError(f"not a par-expression: {expr!r}")


def _scale(m: Monomial, k) -> Monomial:
    return Monomial(m.quants, m.coef * k, m.factors, m.divisors, m.locals)


def _separate(a: Monomial, b: Monomial, names: _Names) -> Monomial:
    """Rename ``b``'s quantified variables that clash with anything in ``a``."""
    clash = {v for v in b.locals if v.name in a.names()}
    return b.renamed({v: names.fresh(v) for v in sorted(clash, key=lambda v: v.name)})


def _product(a: Monomial, b: Monomial, names: _Names) -> Monomial:
    b = _separate(a, b, names)
    a = _separate(b, a, names)
    return Monomial(a.quants + b.quants, a.coef * b.coef, a.factors + b.factors,
                    a.divisors + b.divisors, a.locals | b.locals)


def _divide(m: Monomial, divisor, names: _Names) -> Monomial:
    divisor_names = {v.name for v in expr_vars(divisor)}
    clash = {v for v in m.locals if v.name in divisor_names}
    m = m.renamed({v: names.fresh(v) for v in sorted(clash, key=lambda v: v.name)})
    return Monomial(m.quants, m.coef, m.factors, m.divisors + (divisor,), m.locals)


# ---------------------------------------------------------------------------
# back to syntax

def monomial_expr(m: Monomial, signed: bool = True):
    coef = m.coef if signed else abs(m.coef)
    parts = list(m.factors)
    if coef == -1 and parts:
        e = _chain(parts)
        e = Neg(e)
    elif coef != 1 or not parts:
        e = _chain([Num(coef)] + parts)
    else:
        e = _chain(parts)
    for d in m.divisors:
        e = BinOp("/", e, d)
    for mode, q in reversed(m.quants):
        e = Sum(mode, q, e)
    return e


def _chain(parts):
    e = parts[0]
    for p in parts[1:]:
        e = BinOp("*", e, p)
    return e


def monomials_expr(ms: list[Monomial]):
    if not ms:
        return Num(Fraction(0))
    e = monomial_expr(ms[0])
    for m in ms[1:]:
        e = BinOp("-" if m.coef < 0 else "+", e, monomial_expr(m, signed=False))
    return e


# ---------------------------------------------------------------------------
# items

@dataclass(frozen=True)
class PrenexConstraint:
    query: tuple | None
    rel: str
    lhs: tuple  # monomials of lhs - rhs
    template: Constraint


@dataclass(frozen=True)
class PrenexObjective:
    sense: str
    terms: tuple
    template: Objective


def _item_names(*exprs, query=None) -> _Names:
    taken = {v.name for e in exprs for v in expr_vars(e)}
    taken.update(v.name for v in query_vars(query))
    return _Names(taken)


def prenex_objective(model: RlpModel) -> PrenexObjective:
    obj = model.objective
    names = _item_names(obj.expr)
    e = inline(obj.expr, model.defined, names)
    return PrenexObjective(obj.sense, tuple(monomials(e, frozenset(), names)), obj)


def prenex_constraint(model: RlpModel, c: Constraint) -> PrenexConstraint:
    names = _item_names(c.lhs, c.rhs, query=c.query)
    scope = frozenset(v for v in query_vars(c.query) if not v.anonymous)
    diff = BinOp("-", inline(c.lhs, model.defined, names), inline(c.rhs, model.defined, names))
    return PrenexConstraint(c.query, c.rel, tuple(monomials(diff, scope, names)), c)


def to_prenex(model: RlpModel) -> RlpModel:
    """Inline definitions and pull sums outward; the result has no definitions."""
    obj = model.objective
    pobj = prenex_objective(model)
    cons = []
    for c in model.constraints:
        names = _item_names(c.lhs, c.rhs, query=c.query)
        scope = frozenset(v for v in query_vars(c.query) if not v.anonymous)
        lhs = monomials(inline(c.lhs, model.defined, names), scope, names)
        rhs = monomials(inline(c.rhs, model.defined, names), scope, names)
        cons.append(Constraint(c.query, monomials_expr(lhs), c.rel, monomials_expr(rhs), c.line))
    return RlpModel(model.var_decls, (),
                    Objective(obj.sense, monomials_expr(list(pobj.terms)), obj.line), tuple(cons))


__all__ = [
    "Monomial", "PrenexConstraint", "PrenexError", "PrenexObjective", "inline", "monomials",
    "prenex_constraint", "prenex_objective", "to_prenex",
]
