"""Static checks of a model against a knowledge base before grounding."""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..logkb.program import Literal, LogicProgram, literal_vars
from ..terms import Var, format_atom
from .ast import Ref, RlpModel, Sum, free_vars, iter_nodes, refs
from .prenex import PrenexError, _Names, inline, monomials, prenex_constraint, prenex_objective


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        lines = [f"error: {v}" for v in self.violations] + [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


class ValidationError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("model failed validation:\n" + "\n".join(report.violations))


def _knows(kb, key) -> bool:
    if isinstance(kb, LogicProgram):
        if key in kb.defined():
            return True
        return key[1] > 0 and (key[0], key[1] - 1) in kb.valued()
    return kb.knows(key)


def _check_query(query, outer: set, where: str, model: RlpModel, kb, report) -> set:
    """Check literal safety and roles; return the variables bound after the query."""
    bound = set(outer)
    for lit in query:
        if isinstance(lit, Literal) and not lit.negated:
            bound.update(v for v in literal_vars(lit) if not v.anonymous)
    for lit in query:
        if isinstance(lit, Literal):
            key = lit.atom.key
            role = model.role(key)
            if role != "parameter":
                report.violations.append(f"{where}: query uses {role} predicate "
                                         f"{key[0]}/{key[1]} (only knowledge-base predicates "
                                         "can be queried)")
            elif kb is not None and not _knows(kb, key):
                report.warnings.append(f"{where}: predicate {key[0]}/{key[1]} has no facts or "
                                       "rules; the query is empty")
            if not lit.negated:
                continue
        for v in literal_vars(lit):
            if not v.anonymous and v not in bound:
                report.violations.append(f"{where}: unsafe query, variable {v.name} in "
                                         f"`{lit!r}` is not bound by a positive literal")
    return bound


def _check_expr(expr, outer: set, where: str, model: RlpModel, kb, report) -> None:
    def walk(e, bound):
        if isinstance(e, Sum):
            walk(e.body, _check_query(e.query, bound, where, model, kb, report))
            return
        for child in _children(e):
            walk(child, bound)

    walk(expr, set(outer))
    for r in refs(expr):
        key = r.atom.key
        if model.role(key) == "parameter" and kb is not None and not _knows(kb, key):
            report.violations.append(f"{where}: parameter {key[0]}/{key[1]} (in "
                                     f"`{format_atom(r.atom)}`) is not defined in the "
                                     "knowledge base")


def _children(e):
    for name in ("expr", "lhs", "rhs", "body"):
        c = getattr(e, name, None)
        if c is not None and not isinstance(c, (str, tuple)):
            yield c


def _check_linear(ms, where: str, model: RlpModel, report) -> None:
    declared = model.declared
    for m in ms:
        lp_vars = [f for f in m.factors if f.atom.key in declared]
        if len(lp_vars) > 1:
            report.violations.append(
                f"{where}: nonlinear term, product of LP variables "
                + " * ".join(format_atom(f.atom) for f in lp_vars))
        for d in m.divisors:
            if any(isinstance(n, Ref) and n.atom.key in declared for n in iter_nodes(d)):
                report.violations.append(f"{where}: division by an expression containing "
                                         "LP variables")
                break


def validate(model: RlpModel, kb=None) -> ValidationReport:
    """Check a model; ``kb`` is a :class:`LogicProgram` or a materialized knowledge base."""
    report = ValidationReport()
    defined = model.defined

    # definitions: shape and recursion
    g = nx.DiGraph()
    for d in model.definitions:
        where = f"line {d.line} (definition of {d.head.pred}/{d.head.arity})"
        g.add_node(d.head.key)
        args = d.head.args
        if not all(isinstance(a, Var) and not a.anonymous for a in args) \
                or len(set(args)) != len(args):
            report.violations.append(f"{where}: head arguments must be distinct named variables")
        for r in refs(d.body):
            if r.atom.key in defined:
                g.add_edge(d.head.key, r.atom.key)
        fv = [v for v in free_vars(d.body) if v not in args]
        if fv:
            report.violations.append(f"{where}: variable {fv[0].name} is neither a head "
                                     "argument nor bound by a sum")
        _check_expr(d.body, set(a for a in args if isinstance(a, Var)), where, model, kb, report)
    cycles = [c for c in nx.simple_cycles(g)]
    for cyc in sorted(cycles):
        chain = " -> ".join(f"{p}/{k}" for p, k in cyc + [cyc[0]])
        report.violations.append(f"recursive definition: {chain}")
    if cycles:
        return report

    obj = model.objective
    if obj is not None:
        where = f"line {obj.line} (objective)"
        _check_expr(obj.expr, set(), where, model, kb, report)
        names = _Names(())
        try:
            fv = free_vars(inline(obj.expr, defined, names))
        except PrenexError as e:
            report.violations.append(f"{where}: {e}")
            fv = []
        for v in fv:
            report.violations.append(f"{where}: variable {v.name} is not bound by a sum "
                                     "(the objective must be a single ground expression)")
        if not fv:
            _check_linear(prenex_objective(model).terms, where, model, report)

    for c in model.constraints:
        where = f"line {c.line} (constraint)"
        bound = set()
        if c.query is not None:
            bound = _check_query(c.query, set(), where, model, kb, report)
        for side in (c.lhs, c.rhs):
            _check_expr(side, bound, where, model, kb, report)
            fv = free_vars(inline(side, defined, _Names(())), bound)
            for v in fv:
                report.violations.append(f"{where}: variable {v.name} is not bound by the "
                                         "index query or a sum")
        _check_linear(prenex_constraint(model, c).lhs, where, model, report)
    # keep messages unique and in first-seen order
    report.violations = list(dict.fromkeys(report.violations))
    report.warnings = list(dict.fromkeys(report.warnings))
    return report


__all__ = ["ValidationError", "ValidationReport", "validate"]
