"""Expansion of a relational model against a knowledge base into a ground LP."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .lang.ast import BinOp, Neg, Num, Ref, RlpModel, Sum
from .lang.prenex import Monomial, prenex_constraint, prenex_objective
from .lang.validate import ValidationError, validate
from .logkb.engine import AbsentValueError, MaterializedKB
from .terms import Atom, format_atom, format_number, format_term, is_ground, substitute_atom

log = logging.getLogger(__name__)

RELS = ("<=", ">=", "=")


class GroundingError(ValueError):
    pass


@dataclass
class LinExpr:
    constant: Fraction = Fraction(0)
    terms: dict[int, Fraction] = field(default_factory=dict)

    def add(self, col: int, coef: Fraction) -> None:
        v = self.terms.get(col, 0) + coef
        if v:
            self.terms[col] = v
        else:
            self.terms.pop(col, None)


@dataclass(frozen=True)
class Row:
    coeffs: dict  # column -> coefficient, no zeros
    rel: str
    rhs: Fraction
    provenance: str = ""


@dataclass
class GroundLP:
    """``sense c.x + offset`` subject to rows ``sum coeffs[j] x_j REL rhs``; variables are free."""

    var_names: list[Atom] = field(default_factory=list)
    c: list[Fraction] = field(default_factory=list)
    sense: str = "minimize"
    rows: list[Row] = field(default_factory=list)
    offset: Fraction = Fraction(0)
    warnings: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.var_names)

    @property
    def m(self) -> int:
        return len(self.rows)

    def names(self) -> list[str]:
        return [format_atom(a) for a in self.var_names]

    def objective_value(self, x) -> Fraction:
        return sum((ci * xi for ci, xi in zip(self.c, x) if ci), Fraction(0)) + self.offset

    def to_json(self) -> dict:
        names = self.names()
        return {
            "sense": self.sense,
            "vars": names,
            "c": [format_number(v) for v in self.c],
            "offset": format_number(self.offset),
            "rows": [{"coeffs": {names[j]: format_number(v) for j, v in r.coeffs.items()},
                      "rel": r.rel, "rhs": format_number(r.rhs)} for r in self.rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


class SizeReport(NamedTuple):
    vars: int
    rows: int
    nnz: int


def stats(lp) -> SizeReport:
    """(#columns, #rows, #nonzeros) of a ground or dual-form LP."""
    if isinstance(lp, GroundLP):
        return SizeReport(lp.n, lp.m, sum(len(r.coeffs) for r in lp.rows))
    return SizeReport(lp.n, lp.m, lp.nnz)


class _Grounder:
    def __init__(self, model: RlpModel, kb: MaterializedKB):
        self.model = model
        self.kb = kb
        self.declared = model.declared
        self.cols: dict[Atom, int] = {}
        self.names: list[Atom] = []
        self.where = ""

    def column(self, atom: Atom) -> int:
        j = self.cols.get(atom)
        if j is None:
            j = self.cols[atom] = len(self.names)
            self.names.append(atom)
        return j

    def answers(self, mode: str, query, theta: dict) -> list[dict]:
        if mode == "set":
            return self.kb.query_set(query, theta)
        return self.kb.query_multiset(query, theta)

    def ground_atom(self, atom: Atom, theta: dict) -> Atom:
        g = substitute_atom(atom, theta)
        if not all(is_ground(a) for a in g.args):
            raise GroundingError(f"{self.where}: `{format_atom(g)}` is not ground; "
                                 "a variable is not bound by any query")
        return g

    def param(self, atom: Atom, theta: dict) -> Fraction:
        g = self.ground_atom(atom, theta)
        try:
            return self.kb.lookup_value(g)
        except AbsentValueError:
            raise GroundingError(f"{self.where}: no value for parameter "
                                 f"`{format_atom(g)}` in the knowledge base") from None

    def scalar(self, e, theta: dict) -> Fraction:
        """Evaluate a parameter-only expression."""
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Ref):
            if e.atom.key in self.declared:
                raise GroundingError(f"{self.where}: LP variable in a parameter position")
            return self.param(e.atom, theta)
        if isinstance(e, Neg):
            return -self.scalar(e.expr, theta)
        if isinstance(e, BinOp):
            a, b = self.scalar(e.lhs, theta), self.scalar(e.rhs, theta)
            if e.op == "/":
                if b == 0:
                    raise GroundingError(f"{self.where}: division by zero")
                return a / b
            return {"+": a + b, "-": a - b, "*": a * b}[e.op]
        if isinstance(e, Sum):
            return sum((self.scalar(e.body, {**theta, **a})
                        for a in self.answers(e.mode, e.query, theta)), Fraction(0))
        raise TypeError(e)

    def expand(self, m: Monomial, k: int, theta: dict, out: LinExpr) -> None:
        if k < len(m.quants):
            mode, q = m.quants[k]
            for a in self.answers(mode, q, theta):
                self.expand(m, k + 1, {**theta, **a}, out)
            return
        coef = m.coef
        col = None
        for f in m.factors:
            if f.atom.key in self.declared:
                if col is not None:
                    raise GroundingError(f"{self.where}: nonlinear product of LP variables")
                col = self.column(self.ground_atom(f.atom, theta))
            else:
                coef *= self.param(f.atom, theta)
        for d in m.divisors:
            v = self.scalar(d, theta)
            if v == 0:
                raise GroundingError(f"{self.where}: division by zero")
            coef /= v
        if col is None:
            out.constant += coef
        else:
            out.add(col, coef)

    def linexpr(self, ms, theta: dict) -> LinExpr:
        out = LinExpr()
        for m in ms:
            self.expand(m, 0, theta, out)
        return out


def _provenance(line: int, theta: dict) -> str:
    if not theta:
        return f"line {line}"
    binds = ", ".join(f"{v.name}={format_term(t)}" for v, t in theta.items())
    return f"line {line}: {binds}"


def ground(model: RlpModel, kb: MaterializedKB, check: bool = True) -> GroundLP:
    """Ground ``model`` against ``kb``: objective first, then constraints in source order."""
    if check:
        report = validate(model, kb)
        if not report.ok:
            raise ValidationError(report)
    g = _Grounder(model, kb)
    lp = GroundLP()

    obj = prenex_objective(model)
    g.where = f"line {obj.template.line} (objective)"
    e = g.linexpr(obj.terms, {})
    lp.sense = obj.sense
    lp.offset = e.constant
    obj_terms = dict(e.terms)
    if not g.names:
        msg = "objective is empty: its queries have no answers"
        lp.warnings.append(msg)
        log.warning(msg)

    for c in model.constraints:
        pc = prenex_constraint(model, c)
        g.where = f"line {c.line} (constraint)"
        thetas = kb.query_set(c.query) if c.query is not None else [{}]
        for theta in thetas:
            e = g.linexpr(pc.lhs, theta)
            lp.rows.append(Row(dict(e.terms), c.rel, -e.constant, _provenance(c.line, theta)))

    lp.var_names = g.names
    lp.c = [obj_terms.get(j, Fraction(0)) for j in range(len(g.names))]
    return lp


__all__ = ["GroundLP", "GroundingError", "LinExpr", "Row", "SizeReport", "ground", "stats"]
