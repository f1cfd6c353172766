"""Logic programs: clauses, the ``.lkb`` parser/printer and stratification."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .._lexer import ParseError, TermParser, TokenStream, tokenize
from ..terms import (
    Arith, Atom, Compound, Var, atom_vars, format_atom, format_number, format_term,
    iter_subterms, term_vars,
)

RELATIONS = ("<", "<=", ">", ">=", "==", "!=")

PredKey = tuple[str, int]


class ProgramError(ValueError):
    pass


class StratificationError(ProgramError):
    def __init__(self, cycle: list[PredKey]):
        self.cycle = cycle
        path = " -> ".join(f"{p}/{k}" for p, k in cycle)
        super().__init__(f"negation is not stratified: cycle through negation {path}")


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __repr__(self) -> str:
        return ("not " if self.negated else "") + format_atom(self.atom)


@dataclass(frozen=True, slots=True)
class Builtin:
    op: str
    lhs: object
    rhs: object

    def __repr__(self) -> str:
        return f"{format_term(self.lhs)} {self.op} {format_term(self.rhs)}"


def literal_vars(lit, out: list | None = None) -> list[Var]:
    if out is None:
        out = []
    if isinstance(lit, Literal):
        atom_vars(lit.atom, out)
    else:
        term_vars(lit.lhs, out)
        term_vars(lit.rhs, out)
    return out


def format_literal(lit) -> str:
    return repr(lit)


def format_query(lits) -> str:
    return ", ".join(format_literal(l) for l in lits)


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()
    value: Fraction | None = None
    line: int = 0

    @property
    def is_fact(self) -> bool:
        return not self.body

    def __eq__(self, other):
        # source positions are not part of the clause's meaning
        if not isinstance(other, Clause):
            return NotImplemented
        return (self.head, self.body, self.value) == (other.head, other.body, other.value)

    def __hash__(self):
        return hash((self.head, self.body, self.value))

    def __repr__(self) -> str:
        return format_clause(self)


@dataclass
class LogicProgram:
    clauses: list[Clause] = field(default_factory=list)
    strata: list[list[PredKey]] = field(default_factory=list)

    @property
    def facts(self) -> list[Clause]:
        return [c for c in self.clauses if c.is_fact]

    @property
    def rules(self) -> list[Clause]:
        return [c for c in self.clauses if not c.is_fact]

    def defined(self) -> set[PredKey]:
        return {c.head.key for c in self.clauses}

    def valued(self) -> set[PredKey]:
        return {c.head.key for c in self.clauses if c.value is not None}

    def named_constants(self) -> dict[str, Fraction]:
        """0-ary valued facts usable as numbers inside term arithmetic."""
        return {c.head.pred: c.value for c in self.clauses
                if c.is_fact and c.value is not None and not c.head.args}

    def __eq__(self, other):
        if not isinstance(other, LogicProgram):
            return NotImplemented
        return self.clauses == other.clauses


# ---------------------------------------------------------------------------
# parsing

class _LkbParser(TermParser):
    # tokens that end a literal when scanning ahead for a comparison
    literal_stops = (",", ".", ":-", "}")

    def program(self) -> list[Clause]:
        clauses = []
        while self.ts.tok.kind != "EOF":
            clauses.append(self.clause())
        return clauses

    def clause(self) -> Clause:
        ts = self.ts
        self._anon = 0
        start = ts.tok
        head = self.atom()
        value = None
        if ts.accept("="):
            value = self.number()
        body: list = []
        if ts.accept(":-"):
            body.append(self.literal())
            while ts.accept(","):
                body.append(self.literal())
        ts.expect(".")
        return Clause(head, tuple(body), value, start.line)

    def number(self) -> Fraction:
        ts = self.ts
        neg = ts.accept("-")
        t = ts.tok
        if t.kind != "NUM":
            ts.error(f"expected a number, found {ts.describe()}")
        ts.next()
        v = Fraction(t.text)
        return -v if neg else v

    def literal(self):
        ts = self.ts
        if ts.at("not") and ts.peek().kind == "IDENT":
            ts.next()
            return Literal(self.atom(), True)
        # an atom unless followed by a comparison operator
        if ts.tok.kind == "IDENT" and not self._starts_comparison():
            return Literal(self.atom(), False)
        lhs = self.term()
        op = ts.tok
        if op.text not in RELATIONS:
            ts.error(f"expected a comparison operator, found {ts.describe()}")
        ts.next()
        return Builtin(op.text, lhs, self.term())

    def _starts_comparison(self) -> bool:
        # scan past the leading term to see whether a relation follows
        ts = self.ts
        depth = 0
        j = ts.i
        while True:
            t = ts.tokens[j]
            if t.kind == "EOF":
                return False
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
            elif depth == 0 and t.kind == "OP" and t.text in self.literal_stops:
                return False
            elif depth == 0 and t.text in RELATIONS and t.kind == "OP":
                return True
            j += 1


def parse_logkb(text: str, source: str | None = None) -> LogicProgram:
    """Parse ``.lkb`` text, check range restriction and compute strata."""
    ts = TokenStream(tokenize(text, "%", source), source)
    clauses = _LkbParser(ts).program()
    program = LogicProgram(clauses)
    program.strata = stratify(program)
    check_program(program, source)
    return program


def parse_query(text: str) -> tuple:
    """Parse a conjunction such as ``"edge(X, Y), not source(X)"``."""
    ts = TokenStream(tokenize(text, "%"))
    p = _LkbParser(ts)
    lits = [p.literal()]
    while ts.accept(","):
        lits.append(p.literal())
    ts.accept(".")
    if ts.tok.kind != "EOF":
        ts.error(f"unexpected {ts.describe()} after query")
    return tuple(lits)


def _fail(msg: str, clause: Clause, source: str | None):
    where = f"{source}:" if source else ""
    raise ProgramError(f"{where}{clause.line}: {msg} in `{format_clause(clause)}`")


def check_program(program: LogicProgram, source: str | None = None) -> None:
    defined = program.defined()
    for c in program.clauses:
        if c.is_fact:
            vs = atom_vars(c.head)
            if vs:
                _fail(f"fact contains variable {vs[0].name}", c, source)
            continue
        bound: set[Var] = set()
        for lit in c.body:
            if isinstance(lit, Literal) and not lit.negated:
                bound.update(atom_vars(lit.atom))
        for v in atom_vars(c.head):
            if v.anonymous:
                _fail("anonymous variable in rule head", c, source)
            if v not in bound:
                _fail(f"head variable {v.name} does not occur in a positive body literal", c, source)
        for lit in c.body:
            if isinstance(lit, Literal) and not lit.negated:
                continue
            for v in literal_vars(lit):
                if v.anonymous and isinstance(lit, Literal):
                    continue
                if v not in bound:
                    kind = "negated literal" if isinstance(lit, Literal) else "comparison"
                    _fail(f"variable {v.name} in {kind} is not bound by a positive literal", c, source)
        _check_head_functors(c, defined, source)


def _check_head_functors(c: Clause, defined, source) -> None:
    # compound terms in heads must be assembled from body-bound pieces; reject
    # nesting of the head predicate's own output inside a functor (generative recursion)
    for lit in c.body:
        if isinstance(lit, Literal) and not lit.negated and lit.atom.key == c.head.key:
            for arg in c.head.args:
                for sub in iter_subterms(arg):
                    if isinstance(sub, (Compound, Arith)) and term_vars(sub):
                        _fail("recursive rule builds new terms in its head (unbounded functor nesting)",
                              c, source)


def value_access_key(atom: Atom, defined: set[PredKey], valued: set[PredKey]) -> PredKey | None:
    """``p(a, b, V)`` reads the value of valued ``p/2`` when ``p/3`` itself is undefined."""
    if atom.key in defined or not atom.args:
        return None
    base = (atom.pred, len(atom.args) - 1)
    return base if base in valued else None


def dependency_edges(program: LogicProgram) -> dict[PredKey, dict[PredKey, bool]]:
    """head -> {body predicate: strict}; strict edges need a strictly lower stratum."""
    defined = program.defined()
    valued = program.valued()
    deps: dict[PredKey, dict[PredKey, bool]] = defaultdict(dict)
    for c in program.clauses:
        h = c.head.key
        deps.setdefault(h, {})
        for lit in c.body:
            if not isinstance(lit, Literal):
                continue
            key = lit.atom.key
            strict = lit.negated
            va = value_access_key(lit.atom, defined, valued)
            if va is not None:
                key, strict = va, True
            deps[h][key] = deps[h].get(key, False) or strict
    return deps


def stratify(program: LogicProgram) -> list[list[PredKey]]:
    deps = dependency_edges(program)
    preds = sorted(set(deps) | {k for d in deps.values() for k in d})
    stratum = {p: 0 for p in preds}
    limit = len(preds)
    changed = True
    while changed:
        changed = False
        for h in preds:
            for b, strict in deps.get(h, {}).items():
                need = stratum[b] + (1 if strict else 0)
                if need > stratum[h]:
                    stratum[h] = need
                    changed = True
                    if need > limit:
                        raise StratificationError(_negative_cycle(deps))
    layers: dict[int, list[PredKey]] = defaultdict(list)
    for p in preds:
        layers[stratum[p]].append(p)
    return [layers[k] for k in sorted(layers)]


def _negative_cycle(deps) -> list[PredKey]:
    import networkx as nx

    g = nx.DiGraph()
    for h, d in deps.items():
        for b, strict in d.items():
            g.add_edge(h, b, strict=strict)
    for comp in nx.strongly_connected_components(g):
        for h in sorted(comp):
            for b in sorted(deps.get(h, {})):
                if b in comp and deps[h][b]:
                    back = nx.shortest_path(g.subgraph(comp), b, h)
                    return [h] + back
    return []


# ---------------------------------------------------------------------------
# printing

def format_clause(c: Clause) -> str:
    s = format_atom(c.head)
    if c.value is not None:
        s += f" = {format_number(c.value)}"
    if c.body:
        s += " :- " + ", ".join(format_literal(l) for l in c.body)
    return s + "."


def format_program(program: LogicProgram) -> str:
    return "".join(format_clause(c) + "\n" for c in program.clauses)


__all__ = [
    "Builtin", "Clause", "Literal", "LogicProgram", "ParseError", "ProgramError",
    "StratificationError", "format_clause", "format_literal", "format_program", "format_query",
    "literal_vars", "parse_logkb", "parse_query", "stratify",
]
