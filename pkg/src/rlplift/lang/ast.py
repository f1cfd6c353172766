"""Syntax tree of relational linear programs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..logkb.program import Literal, literal_vars
from ..terms import Atom, atom_vars, term_vars

SET = "set"
MULTISET = "multiset"


@dataclass(frozen=True, slots=True)
class Num:
    value: Fraction


@dataclass(frozen=True, slots=True)
class Ref:
    """An atom inside a par-expression: LP variable, defined name or parameter."""
    atom: Atom


@dataclass(frozen=True, slots=True)
class Neg:
    expr: object


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    lhs: object
    rhs: object


@dataclass(frozen=True, slots=True)
class Sum:
    mode: str  # SET or MULTISET
    query: tuple
    body: object


@dataclass(frozen=True)
class VarDecl:
    pred: str
    arity: int
    line: int = field(default=0, compare=False)

    @property
    def key(self) -> tuple[str, int]:
        return (self.pred, self.arity)


@dataclass(frozen=True)
class Definition:
    head: Atom
    body: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Objective:
    sense: str  # "maximize" or "minimize"
    expr: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Constraint:
    query: tuple | None
    lhs: object
    rel: str  # "<=", ">=" or "="
    rhs: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RlpModel:
    var_decls: tuple = ()
    definitions: tuple = ()
    objective: Objective | None = None
    constraints: tuple = ()

    @property
    def declared(self) -> set[tuple[str, int]]:
        return {d.key for d in self.var_decls}

    @property
    def defined(self) -> dict:
        return {d.head.key: d for d in self.definitions}

    def role(self, key: tuple[str, int]) -> str:
        if key in self.declared:
            return "variable"
        if key in self.defined:
            return "defined"
        return "parameter"


def iter_nodes(e):
    """Pre-order walk over an expression, descending into sum bodies."""
    yield e
    if isinstance(e, Neg):
        yield from iter_nodes(e.expr)
    elif isinstance(e, BinOp):
        yield from iter_nodes(e.lhs)
        yield from iter_nodes(e.rhs)
    elif isinstance(e, Sum):
        yield from iter_nodes(e.body)


def query_vars(query, out: list | None = None) -> list:
    if out is None:
        out = []
    for lit in query or ():
        literal_vars(lit, out)
    return out


def expr_vars(e, out: list | None = None) -> list:
    """All variables of an expression in first-occurrence order, bound or not."""
    if out is None:
        out = []
    for node in iter_nodes(e):
        if isinstance(node, Ref):
            atom_vars(node.atom, out)
        elif isinstance(node, Sum):
            query_vars(node.query, out)
    return out


def free_vars(e, bound=frozenset()) -> list:
    """Named variables of ``e`` not bound by ``bound`` or an enclosing sum query."""
    out: list = []
    _free(e, set(bound), out)
    return out


def _free(e, bound: set, out: list) -> None:
    if isinstance(e, Ref):
        for v in atom_vars(e.atom):
            if not v.anonymous and v not in bound and v not in out:
                out.append(v)
    elif isinstance(e, Neg):
        _free(e.expr, bound, out)
    elif isinstance(e, BinOp):
        _free(e.lhs, bound, out)
        _free(e.rhs, bound, out)
    elif isinstance(e, Sum):
        _free(e.body, bound | {v for v in query_vars(e.query) if not v.anonymous}, out)


def refs(e) -> list[Ref]:
    """Atom references outside sum queries."""
    return [n for n in iter_nodes(e) if isinstance(n, Ref)]


def query_atoms(e) -> list[Atom]:
    out = []
    for n in iter_nodes(e):
        if isinstance(n, Sum):
            out.extend(l.atom for l in n.query if isinstance(l, Literal))
    return out


def rename_expr(e, mapping: dict):
    """Rename variables everywhere, including sum queries."""
    from ..logkb.program import Builtin
    from ..terms import rename

    def ra(a: Atom) -> Atom:
        return Atom(a.pred, tuple(rename(t, mapping) for t in a.args))

    def rl(lit):
        if isinstance(lit, Literal):
            return Literal(ra(lit.atom), lit.negated)
        return Builtin(lit.op, rename(lit.lhs, mapping), rename(lit.rhs, mapping))

    def go(x):
        if isinstance(x, Ref):
            return Ref(ra(x.atom))
        if isinstance(x, Neg):
            return Neg(go(x.expr))
        if isinstance(x, BinOp):
            return BinOp(x.op, go(x.lhs), go(x.rhs))
        if isinstance(x, Sum):
            return Sum(x.mode, tuple(rl(l) for l in x.query), go(x.body))
        return x

    return go(e)


def substitute_expr(e, theta: dict):
    """Apply a substitution of variables by terms everywhere (used for macro expansion)."""
    from ..logkb.program import Builtin
    from ..terms import substitute, substitute_atom

    def sl(lit):
        if isinstance(lit, Literal):
            return Literal(substitute_atom(lit.atom, theta), lit.negated)
        return Builtin(lit.op, substitute(lit.lhs, theta), substitute(lit.rhs, theta))

    def go(x):
        if isinstance(x, Ref):
            return Ref(substitute_atom(x.atom, theta))
        if isinstance(x, Neg):
            return Neg(go(x.expr))
        if isinstance(x, BinOp):
            return BinOp(x.op, go(x.lhs), go(x.rhs))
        if isinstance(x, Sum):
            return Sum(x.mode, tuple(sl(l) for l in x.query), go(x.body))
        return x

    return go(e)


__all__ = [
    "BinOp", "Constraint", "Definition", "MULTISET", "Neg", "Num", "Objective", "Ref",
    "RlpModel", "SET", "Sum", "VarDecl", "expr_vars", "free_vars", "iter_nodes", "query_vars",
    "refs", "rename_expr", "substitute_expr",
]
