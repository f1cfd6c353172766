"""Parser and printer for ``.rlp`` model files."""
from __future__ import annotations

from fractions import Fraction

from .._lexer import ParseError, TokenStream, tokenize
from ..logkb.program import _LkbParser, format_query
from ..terms import format_atom, format_number
from .ast import (
    MULTISET, SET, BinOp, Constraint, Definition, Neg, Num, Objective, Ref, RlpModel, Sum,
    VarDecl,
)

SENSES = {"maximize": "maximize", "maximise": "maximize",
          "minimize": "minimize", "minimise": "minimize"}
CONSTRAINT_RELS = ("<=", ">=", "=")


class ModelError(ValueError):
    """A well-formed file that does not describe a valid model (roles, objectives)."""


class _RlpParser(_LkbParser):
    def model(self) -> RlpModel:
        ts = self.ts
        decls: list[VarDecl] = []
        defs: list[Definition] = []
        objectives: list[Objective] = []
        cons: list[Constraint] = []
        while ts.tok.kind != "EOF":
            self._anon = 0
            t = ts.tok
            if t.kind == "IDENT" and t.text == "var" and ts.peek().kind == "IDENT":
                decls.append(self.vardecl())
            elif t.kind == "IDENT" and t.text in SENSES and ts.peek().text == ":":
                objectives.append(self.objective())
            elif t.kind == "IDENT" and t.text == "subject" and ts.peek().text == "to":
                cons.extend(self.constraint())
            else:
                defs.append(self.definition())
        return _assemble(decls, defs, objectives, cons, ts.source)

    def vardecl(self) -> VarDecl:
        ts = self.ts
        line = ts.next().line
        name = ts.next().text
        ts.expect("/")
        t = ts.tok
        if t.kind != "NUM" or not t.text.isdigit():
            ts.error(f"expected an arity, found {ts.describe()}")
        ts.next()
        ts.expect(";")
        return VarDecl(name, int(t.text), line)

    def objective(self) -> Objective:
        ts = self.ts
        t = ts.next()
        ts.expect(":")
        e = self.parexpr()
        ts.expect(";")
        return Objective(SENSES[t.text], e, t.line)

    def constraint(self) -> list[Constraint]:
        ts = self.ts
        line = ts.next().line
        ts.next()  # "to"
        query = None
        colon_first = ts.accept(":")
        if ts.accept("{"):
            query = self.query("}")
        if not colon_first:
            ts.expect(":")
        exprs = [self.parexpr()]
        rels = []
        while ts.tok.kind == "OP" and ts.tok.text in CONSTRAINT_RELS:
            rels.append(ts.next().text)
            exprs.append(self.parexpr())
        if not rels:
            ts.error(f"expected one of <=, >=, = in constraint, found {ts.describe()}")
        if len(rels) > 2:
            ts.error("at most two relations may be chained")
        if len(rels) == 2 and "=" in rels:
            ts.error("equalities cannot be chained")
        ts.expect(";")
        return [Constraint(query, exprs[i], rels[i], exprs[i + 1], line) for i in range(len(rels))]

    def definition(self) -> Definition:
        ts = self.ts
        start = ts.tok
        head = self.atom()
        if ts.at(":-"):
            ts.error("aggregate rules (`:-`) are not supported in models; "
                     "define the predicate in the knowledge base instead")
        ts.expect("=")
        body = self.parexpr()
        ts.expect(";")
        return Definition(head, body, start.line)

    def query(self, close: str) -> tuple:
        ts = self.ts
        saved = self.literal_stops
        self.literal_stops = saved + ((">",) if close == ">" else ())
        try:
            lits = [self.literal()]
            while ts.accept(","):
                lits.append(self.literal())
        finally:
            self.literal_stops = saved
        ts.expect(close)
        return tuple(lits)

    # parexpr := term { (+|-) term }
    def parexpr(self):
        ts = self.ts
        lhs = self.pterm()
        while ts.tok.kind == "OP" and ts.tok.text in ("+", "-"):
            op = ts.next().text
            lhs = BinOp(op, lhs, self.pterm())
        return lhs

    def pterm(self):
        ts = self.ts
        lhs = self.factor()
        while ts.tok.kind == "OP" and ts.tok.text in ("*", "/"):
            op = ts.next().text
            lhs = BinOp(op, lhs, self.factor())
        return lhs

    def factor(self):
        ts = self.ts
        t = ts.tok
        if t.kind == "NUM":
            ts.next()
            return Num(Fraction(t.text))
        if t.kind == "OP" and t.text == "-":
            ts.next()
            if ts.tok.kind == "NUM":
                return Num(-Fraction(ts.next().text))
            return Neg(self.factor())
        if t.kind == "OP" and t.text == "(":
            ts.next()
            e = self.parexpr()
            ts.expect(")")
            return e
        if t.kind == "IDENT" and t.text == "sum" and ts.peek().text in ("{", "<"):
            ts.next()
            if ts.accept("{"):
                q, mode = self.query("}"), SET
            else:
                ts.next()
                q, mode = self.query(">"), MULTISET
            # the body extends over a whole product chain
            return Sum(mode, q, self.pterm())
        if t.kind == "IDENT":
            return Ref(self.atom())
        if t.kind == "VAR":
            ts.error(f"logical variable {t.text} cannot stand alone in a par-expression")
        ts.error(f"expected a par-expression, found {ts.describe()}")


def _assemble(decls, defs, objectives, cons, source) -> RlpModel:
    where = f"{source}:" if source else ""
    seen: dict = {}
    for d in decls:
        if d.key in seen:
            raise ModelError(f"{where}{d.line}: variable {d.pred}/{d.arity} declared twice "
                             f"(first at line {seen[d.key]})")
        seen[d.key] = d.line
    defined: dict = {}
    for d in defs:
        k = d.head.key
        if k in seen:
            raise ModelError(f"{where}{d.line}: {k[0]}/{k[1]} is declared as a variable "
                             "and cannot also be defined")
        if k in defined:
            raise ModelError(f"{where}{d.line}: {k[0]}/{k[1]} defined twice "
                             f"(first at line {defined[k]})")
        defined[k] = d.line
    if not objectives:
        raise ModelError(f"{where} model has no objective".lstrip())
    if len(objectives) > 1:
        lines = ", ".join(str(o.line) for o in objectives)
        raise ModelError(f"{where} model has {len(objectives)} objectives (lines {lines}); "
                         "exactly one is allowed".lstrip())
    return RlpModel(tuple(decls), tuple(defs), objectives[0], tuple(cons))


def parse_rlp(text: str, source: str | None = None) -> RlpModel:
    ts = TokenStream(tokenize(text, "#", source), source)
    return _RlpParser(ts).model()


def load_rlp(path) -> RlpModel:
    with open(path, encoding="utf-8") as fh:
        return parse_rlp(fh.read(), source=str(path))


# ---------------------------------------------------------------------------
# printing

def format_expr(e, prec: int = 0, open_tail: bool = False) -> str:
    """Print an expression so that it parses back to the same tree.

    ``open_tail`` is set when a ``*`` or ``/`` follows; a sum there must be
    parenthesized or its body would swallow the rest of the product.
    """
    if isinstance(e, Num):
        s = format_number(e.value)
        return f"({s})" if e.value < 0 and prec >= 3 else s
    if isinstance(e, Ref):
        return format_atom(e.atom)
    if isinstance(e, Neg):
        inner = e.expr
        if isinstance(inner, Num):
            return f"-({format_number(inner.value)})"
        s = "-" + format_expr(inner, 3, open_tail)
        return f"({s})" if prec >= 3 else s
    if isinstance(e, BinOp):
        if e.op in "+-":
            s = f"{format_expr(e.lhs, 1)} {e.op} {format_expr(e.rhs, 2)}"
            return f"({s})" if prec > 1 else s
        tail = open_tail and prec <= 2
        s = f"{format_expr(e.lhs, 2, True)} {e.op} {format_expr(e.rhs, 3, tail)}"
        return f"({s})" if prec > 2 else s
    if isinstance(e, Sum):
        o, c = ("{", "}") if e.mode == SET else ("<", ">")
        s = f"sum{o}{format_query(e.query)}{c} {format_expr(e.body, 2)}"
        return f"({s})" if open_tail else s
    raise TypeError(f"not a par-expression: {e!r}")


def format_model(model: RlpModel) -> str:
    lines = [f"var {d.pred}/{d.arity};" for d in model.var_decls]
    for d in model.definitions:
        lines.append(f"{format_atom(d.head)} = {format_expr(d.body)};")
    if model.objective is not None:
        lines.append(f"{model.objective.sense}: {format_expr(model.objective.expr)};")
    for c in model.constraints:
        q = f" {{{format_query(c.query)}}}" if c.query is not None else ""
        lines.append(f"subject to{q}: {format_expr(c.lhs)} {c.rel} {format_expr(c.rhs)};")
    return "".join(line + "\n" for line in lines)


__all__ = ["ModelError", "ParseError", "format_expr", "format_model", "load_rlp", "parse_rlp"]
