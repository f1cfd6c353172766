"""Bottom-up evaluation of logic programs and queries over the result.

Predicates are evaluated one strongly connected component at a time, in
dependency order (a refinement of the strata).  Non-recursive components are
joined once and keep exact derivation counts, which back ``findall``-style
multiset queries.  Recursive components run a semi-naive fixpoint; their
atoms count as derived once.
"""
from __future__ import annotations

import operator
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import networkx as nx

from ..terms import (
    Arith, Atom, Compound, TermError, Var, atom_key, atom_vars, format_atom, is_ground,
    match_args, named_vars, substitute, subsumes, term_key,
)
from .program import (
    Builtin, Clause, Literal, LogicProgram, PredKey, ProgramError, dependency_edges,
    format_clause, literal_vars, value_access_key,
)

DEFAULT_DERIVATION_CAP = 10**7

_COMPARE = {
    "<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


class EvaluationError(ProgramError):
    pass


class ValueConflictError(EvaluationError):
    pass


class AbsentValueError(KeyError):
    def __init__(self, atom: Atom):
        self.atom = atom
        super().__init__(f"no value for {format_atom(atom)} in the knowledge base")

    def __str__(self) -> str:
        return self.args[0]


class UnsafeQueryError(ValueError):
    pass


class Relation:
    """Ground tuples of one predicate with derivation counts and optional values."""

    __slots__ = ("key", "counts", "values", "_indexes")

    def __init__(self, key: PredKey):
        self.key = key
        self.counts: dict[tuple, int] = {}
        self.values: dict[tuple, Fraction] = {}
        self._indexes: dict[tuple[int, ...], dict[tuple, list[tuple]]] = {}

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, args: tuple) -> bool:
        return args in self.counts

    def add(self, args: tuple, count: int = 1) -> bool:
        if args in self.counts:
            self.counts[args] += count
            return False
        self.counts[args] = count
        for positions, index in self._indexes.items():
            index.setdefault(tuple(args[p] for p in positions), []).append(args)
        return True

    def lookup(self, positions: tuple[int, ...], key: tuple) -> Iterable[tuple]:
        if not positions:
            return self.counts.keys()
        index = self._indexes.get(positions)
        if index is None:
            index = defaultdict(list)
            for args in self.counts:
                index[tuple(args[p] for p in positions)].append(args)
            index = dict(index)
            self._indexes[positions] = index
        return index.get(key, ())


# ---------------------------------------------------------------------------
# conjunctions

class _Plan:
    """A conjunction reordered so negations and comparisons run once their variables are bound."""

    __slots__ = ("steps",)

    def __init__(self, literals: Sequence, bound: Iterable[Var], defined, valued,
                 strict: bool, context: str = "query"):
        bound = set(bound)
        pending = []
        steps = []

        def flush():
            for lit in list(pending):
                if all(v in bound or (v.anonymous and isinstance(lit, Literal))
                       for v in literal_vars(lit)):
                    steps.append(lit)
                    pending.remove(lit)

        flush()
        for lit in literals:
            if isinstance(lit, Literal) and not lit.negated:
                va = value_access_key(lit.atom, defined, valued)
                steps.append(("value", lit.atom, va) if va else ("pos", lit.atom, lit.atom.key))
                bound.update(atom_vars(lit.atom))
            else:
                pending.append(lit)
            flush()
        if pending and strict:
            lit = pending[0]
            free = [v for v in literal_vars(lit) if v not in bound and not v.anonymous]
            name = free[0].name if free else "?"
            raise UnsafeQueryError(f"unsafe {context}: variable {name} in `{lit!r}` is not bound "
                                   "by a preceding positive literal")
        self.steps = steps


def _solve(steps, k: int, theta: dict, count: int, rels, delta_at: int = -1, delta=None):
    if k == len(steps):
        yield theta, count
        return
    step = steps[k]
    if isinstance(step, tuple):
        kind, atom, key = step
        if k == delta_at:
            rel = delta
        else:
            rel = rels.get(key)
        if rel is None:
            return
        args = [substitute(a, theta) for a in atom.args]
        if kind == "value":
            # last argument binds the hidden value
            value_pat = args.pop()
        positions = tuple(i for i, a in enumerate(args) if is_ground(a))
        key_vals = tuple(args[i] for i in positions)
        free = [i for i in range(len(args)) if i not in positions]
        pats = tuple(args[i] for i in free)
        for row in rel.lookup(positions, key_vals):
            t2 = match_args(pats, tuple(row[i] for i in free), theta) if free else theta
            if t2 is None:
                continue
            if kind == "value":
                t2 = match_args((value_pat,), (rel.values[row],), t2)
                if t2 is None:
                    continue
            yield from _solve(steps, k + 1, t2, count * rel.counts[row], rels, delta_at, delta)
    elif isinstance(step, Literal):  # negated
        atom = step.atom
        rel = rels.get(atom.key)
        args = tuple(substitute(a, theta) for a in atom.args)
        if rel is not None:
            if all(is_ground(a) for a in args):
                if args in rel:
                    return
            else:
                positions = tuple(i for i, a in enumerate(args) if is_ground(a))
                free = [i for i in range(len(args)) if i not in positions]
                for row in rel.lookup(positions, tuple(args[i] for i in positions)):
                    if match_args(tuple(args[i] for i in free), tuple(row[i] for i in free), theta) \
                            is not None:
                        return
        yield from _solve(steps, k + 1, theta, count, rels, delta_at, delta)
    else:
        if _builtin_holds(step, theta):
            yield from _solve(steps, k + 1, theta, count, rels, delta_at, delta)


def _builtin_holds(b: Builtin, theta) -> bool:
    lhs = substitute(b.lhs, theta)
    rhs = substitute(b.rhs, theta)
    if b.op == "==":
        return lhs == rhs
    if b.op == "!=":
        return lhs != rhs
    if not (isinstance(lhs, Fraction) and isinstance(rhs, Fraction)):
        raise TermError(f"comparison `{b!r}` needs numeric operands, got "
                        f"{lhs!r} and {rhs!r}")
    return _COMPARE[b.op](lhs, rhs)


# ---------------------------------------------------------------------------
# materialized knowledge base

class MaterializedKB:
    """Immutable result of :func:`evaluate`; answers the grounder's queries."""

    def __init__(self, relations: dict[PredKey, Relation], valued: set[PredKey],
                 defined: set[PredKey], program: LogicProgram | None = None):
        self._rels = relations
        self.valued = frozenset(valued)
        self.defined = frozenset(defined)
        self.program = program
        self._plans: dict = {}

    # -- inspection
    def predicates(self) -> list[PredKey]:
        return sorted(self._rels)

    def relation(self, key: PredKey) -> Relation | None:
        return self._rels.get(key)

    def atoms(self, key: PredKey | None = None) -> list[Atom]:
        keys = [key] if key is not None else self.predicates()
        out = []
        for k in keys:
            rel = self._rels.get(k)
            if rel is not None:
                out.extend(Atom(k[0], args) for args in rel.counts)
        out.sort(key=atom_key)
        return out

    def facts(self) -> list[tuple[Atom, Fraction | None]]:
        """Every materialized ground atom with its value (``None`` for truth-valued atoms)."""
        out = []
        for k in self.predicates():
            rel = self._rels[k]
            for args in rel.counts:
                out.append((Atom(k[0], args), rel.values.get(args)))
        out.sort(key=lambda av: atom_key(av[0]))
        return out

    def count(self, atom: Atom) -> int:
        rel = self._rels.get(atom.key)
        return rel.counts.get(atom.args, 0) if rel else 0

    def __len__(self) -> int:
        return sum(len(r) for r in self._rels.values())

    def knows(self, key: PredKey) -> bool:
        """Whether a predicate (or its value-access form) is backed by the knowledge base."""
        if key in self.defined or key in self._rels:
            return True
        return key[1] > 0 and (key[0], key[1] - 1) in self.valued

    # -- values
    def lookup_value(self, atom: Atom) -> Fraction:
        key = atom.key
        rel = self._rels.get(key)
        if key in self.valued:
            if rel is not None and atom.args in rel.values:
                return rel.values[atom.args]
            raise AbsentValueError(atom)
        if rel is not None and atom.args in rel.counts:
            return Fraction(1)
        if key in self.defined or rel is not None:
            return Fraction(0)
        raise AbsentValueError(atom)

    # -- queries
    def _plan(self, conjunction: tuple, bound: frozenset) -> _Plan:
        ck = (conjunction, bound)
        plan = self._plans.get(ck)
        if plan is None:
            plan = _Plan(conjunction, bound, self.defined | set(self._rels), self.valued, True)
            self._plans[ck] = plan
        return plan

    def _answers(self, conjunction, bound: dict | None):
        conjunction = tuple(conjunction)
        bound = dict(bound or {})
        plan = self._plan(conjunction, frozenset(bound))
        out_vars: list[Var] = []
        for lit in conjunction:
            for v in named_vars(literal_vars(lit)):
                if v not in bound and v not in out_vars:
                    out_vars.append(v)
        return out_vars, _solve(plan.steps, 0, bound, 1, self._rels)

    def query_multiset(self, conjunction, bound: dict | None = None) -> list[dict]:
        """One substitution per derivation, projected on the named free variables."""
        out_vars, answers = self._answers(conjunction, bound)
        rows = []
        for theta, count in answers:
            proj = tuple(theta[v] for v in out_vars)
            rows.extend([proj] * count)
        rows.sort(key=lambda r: tuple(term_key(t) for t in r))
        return [dict(zip(out_vars, r)) for r in rows]

    def query_set(self, conjunction, bound: dict | None = None) -> list[dict]:
        """Duplicate-free substitutions, lexicographically ordered on the bound terms."""
        out_vars, answers = self._answers(conjunction, bound)
        seen = {tuple(theta[v] for v in out_vars) for theta, _ in answers}
        rows = sorted(seen, key=lambda r: tuple(term_key(t) for t in r))
        return [dict(zip(out_vars, r)) for r in rows]


# ---------------------------------------------------------------------------
# evaluation

def _resolve_constants(t, consts: dict[str, Fraction]):
    if isinstance(t, str):
        return consts.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_resolve_constants(a, consts) for a in t.args))
    if isinstance(t, Arith):
        return substitute(Arith(t.op, _resolve_constants(t.lhs, consts),
                                _resolve_constants(t.rhs, consts)), {})
    return t


def _resolve_atom(a: Atom, consts) -> Atom:
    return Atom(a.pred, tuple(_resolve_constants(t, consts) for t in a.args))


def _resolve_clause(c: Clause, consts) -> Clause:
    if not consts:
        return c
    if c.is_fact and c.value is not None and not c.head.args:
        return c
    body = []
    for lit in c.body:
        if isinstance(lit, Literal):
            body.append(Literal(_resolve_atom(lit.atom, consts), lit.negated))
        else:
            body.append(Builtin(lit.op, _resolve_constants(lit.lhs, consts),
                                _resolve_constants(lit.rhs, consts)))
    return Clause(_resolve_atom(c.head, consts), tuple(body), c.value, c.line)


def _components(program: LogicProgram) -> list[tuple[list[PredKey], bool]]:
    """SCCs in evaluation order with a flag for recursion."""
    deps = dependency_edges(program)
    g = nx.DiGraph()
    for h, d in deps.items():
        g.add_node(h)
        for b in d:
            g.add_edge(b, h)
    cond = nx.condensation(g)
    order = list(nx.lexicographical_topological_sort(
        cond, key=lambda n: min(cond.nodes[n]["members"])))
    out = []
    for n in order:
        members = sorted(cond.nodes[n]["members"])
        recursive = len(members) > 1 or g.has_edge(members[0], members[0])
        out.append((members, recursive))
    return out


def evaluate(program: LogicProgram, derivation_cap: int = DEFAULT_DERIVATION_CAP) -> MaterializedKB:
    """Materialize the least model of a stratified program.

    Valued heads keep one value per ground atom.  When several clauses derive
    the same atom, facts win over rules, then the most specific rule head
    wins; equally specific clauses must agree.
    """
    consts = program.named_constants()
    clauses = [_resolve_clause(c, consts) for c in program.clauses]
    defined = {c.head.key for c in clauses}
    valued = {c.head.key for c in clauses if c.value is not None}
    for c in clauses:
        if c.value is None and c.head.key in valued:
            raise EvaluationError(f"{c.line}: predicate {c.head.pred}/{c.head.arity} mixes valued "
                                  f"and unvalued clauses: `{format_clause(c)}`")

    by_head: dict[PredKey, list[int]] = defaultdict(list)
    for i, c in enumerate(clauses):
        by_head[c.head.key].append(i)

    rels: dict[PredKey, Relation] = {}
    total = 0
    for members, recursive in _components(LogicProgram(clauses)):
        comp_rules = [i for m in members for i in by_head.get(m, ())]
        if not comp_rules:
            continue
        for m in members:
            rels.setdefault(m, Relation(m))
        # candidate values per atom: list of (clause index, value)
        candidates: dict[PredKey, dict[tuple, list]] = defaultdict(lambda: defaultdict(list))
        plans = {}
        for i in comp_rules:
            c = clauses[i]
            if c.body:
                plans[i] = _Plan(c.body, (), defined, valued, True, "rule body")

        def emit(i: int, theta: dict, count: int) -> tuple | None:
            c = clauses[i]
            try:
                args = tuple(substitute(a, theta) for a in c.head.args)
            except TermError as e:
                raise EvaluationError(f"{c.line}: {e} in `{format_clause(c)}`") from None
            if not all(is_ground(a) for a in args):
                raise EvaluationError(f"{c.line}: head not ground after evaluation: "
                                      f"`{format_clause(c)}`")
            if c.value is not None:
                candidates[c.head.key][args].append((i, c.value, count))
            return args

        if not recursive:
            rel = rels[members[0]]
            for i in comp_rules:
                c = clauses[i]
                if not c.body:
                    args = emit(i, {}, 1)
                    if c.value is None:
                        rel.add(args, 1)
                    continue
                for theta, count in _solve(plans[i].steps, 0, {}, 1, rels):
                    args = emit(i, theta, count)
                    if c.value is None:
                        rel.add(args, count)
                    total += 1
                    if total > derivation_cap:
                        raise EvaluationError(f"derivation cap of {derivation_cap} exceeded")
            if members[0] in valued:
                _resolve_values(rel, candidates[members[0]], clauses)
        else:
            if any(m in valued for m in members):
                raise EvaluationError("valued predicates may not be recursive: "
                                      + ", ".join(f"{p}/{k}" for p, k in members))
            delta: dict[PredKey, Relation] = {m: Relation(m) for m in members}
            for i in comp_rules:
                c = clauses[i]
                answers = [({}, 1)] if not c.body else _solve(plans[i].steps, 0, {}, 1, rels)
                for theta, _ in list(answers):
                    args = emit(i, theta, 1)
                    if args not in rels[c.head.key]:
                        delta[c.head.key].add(args)
            while any(len(d) for d in delta.values()):
                for m, d in delta.items():
                    for args in d.counts:
                        rels[m].add(args, 1)
                total += sum(len(d) for d in delta.values())
                if total > derivation_cap:
                    raise EvaluationError(f"derivation cap of {derivation_cap} exceeded")
                new: dict[PredKey, Relation] = {m: Relation(m) for m in members}
                for i in comp_rules:
                    c = clauses[i]
                    if not c.body:
                        continue
                    steps = plans[i].steps
                    for k, step in enumerate(steps):
                        if not (isinstance(step, tuple) and step[0] == "pos" and step[2] in delta):
                            continue
                        for theta, _ in list(_solve(steps, 0, {}, 1, rels, k, delta[step[2]])):
                            args = emit(i, theta, 1)
                            if args not in rels[c.head.key] and args not in new[c.head.key]:
                                new[c.head.key].add(args)
                delta = new
    return MaterializedKB(rels, valued, defined, program)


def _resolve_values(rel: Relation, cands: dict[tuple, list], clauses: list[Clause]) -> None:
    for args, entries in cands.items():
        facts = [e for e in entries if not clauses[e[0]].body]
        pool = facts or entries
        if not facts:
            heads = {e[0]: Compound(clauses[e[0]].head.pred, clauses[e[0]].head.args) for e in pool}
            winners = []
            for e in pool:
                h = heads[e[0]]
                dominated = any(
                    subsumes(h, heads[o[0]]) and not subsumes(heads[o[0]], h)
                    for o in pool if o[0] != e[0])
                if not dominated:
                    winners.append(e)
            pool = winners
        values = {e[1] for e in pool}
        if len(values) > 1:
            atom = Atom(rel.key[0], args)
            lines = sorted({clauses[e[0]].line for e in pool})
            raise ValueConflictError(
                f"conflicting values {sorted(values)} for {format_atom(atom)} from equally "
                f"specific clauses at lines {lines}")
        value = values.pop()
        winners_idx = {e[0] for e in pool}
        count = sum(e[2] for e in pool if e[0] in winners_idx)
        rel.add(args, count)
        rel.values[args] = value


__all__ = [
    "AbsentValueError", "EvaluationError", "MaterializedKB", "Relation", "UnsafeQueryError",
    "ValueConflictError", "evaluate",
]
