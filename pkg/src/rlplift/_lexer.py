from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .terms import Arith, Atom, Compound, Var


class ParseError(SyntaxError):
    """Syntax error with a 1-based line/column position."""

    def __init__(self, msg: str, line: int, col: int, source: str | None = None):
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col
        self.source = source


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # IDENT, VAR, NUM, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<op>:-|<=|>=|==|!=|[()\[\]{},.;:=<>+\-*/])
    """,
    re.VERBOSE,
)


def tokenize(text: str, comment: str, source: str | None = None) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == comment:
            end = text.find("\n", pos)
            pos = n if end < 0 else end
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {ch!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        s = m.group()
        if kind == "ws":
            nl = s.count("\n")
            if nl:
                line += nl
                line_start = pos + s.rfind("\n") + 1
        else:
            tokens.append(Token(kind.upper(), s, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token], source: str | None = None):
        self.tokens = tokens
        self.i = 0
        self.source = source

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("OP", "IDENT")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.describe()}")
        t = self.tok
        self.i += 1
        return t

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def describe(self) -> str:
        t = self.tok
        return "end of input" if t.kind == "EOF" else repr(t.text)

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col, self.source)


class TermParser:
    """Terms and atoms in the syntax shared by ``.lkb`` and ``.rlp`` files.

    Every ``_`` is a distinct anonymous variable; they are numbered so that
    they never unify with each other.
    """

    def __init__(self, ts: TokenStream):
        self.ts = ts
        self._anon = 0

    def fresh_anon(self) -> Var:
        self._anon += 1
        return Var(f"_{self._anon}")

    # term := sum of products of primaries
    def term(self):
        lhs = self.product()
        while self.ts.tok.kind == "OP" and self.ts.tok.text in "+-" and self._term_continues():
            op = self.ts.next().text
            lhs = Arith(op, lhs, self.product())
        return lhs

    def _term_continues(self) -> bool:
        nxt = self.ts.peek()
        return nxt.kind in ("NUM", "VAR", "IDENT") or nxt.text in ("(", "-")

    def product(self):
        lhs = self.primary()
        while self.ts.tok.kind == "OP" and self.ts.tok.text in "*/":
            op = self.ts.next().text
            lhs = Arith(op, lhs, self.primary())
        return lhs

    def primary(self):
        ts = self.ts
        t = ts.tok
        if t.kind == "NUM":
            ts.next()
            return Fraction(t.text)
        if t.kind == "OP" and t.text == "-":
            ts.next()
            inner = self.primary()
            if isinstance(inner, Fraction):
                return -inner
            return Arith("-", Fraction(0), inner)
        if t.kind == "VAR":
            ts.next()
            if t.text == "_":
                return self.fresh_anon()
            return Var(t.text)
        if t.kind == "IDENT":
            ts.next()
            if ts.at("("):
                return Compound(t.text, self.arglist())
            return t.text
        if t.kind == "OP" and t.text == "(":
            ts.next()
            inner = self.term()
            ts.expect(")")
            return inner
        ts.error(f"expected a term, found {ts.describe()}")

    def arglist(self) -> tuple:
        ts = self.ts
        ts.expect("(")
        args = [self.term()]
        while ts.accept(","):
            args.append(self.term())
        ts.expect(")")
        return tuple(args)

    def atom(self) -> Atom:
        ts = self.ts
        t = ts.tok
        if t.kind != "IDENT":
            ts.error(f"expected a predicate name, found {ts.describe()}")
        ts.next()
        if ts.at("("):
            return Atom(t.text, self.arglist())
        return Atom(t.text, ())
