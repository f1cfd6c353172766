"""Logical knowledge bases: a Datalog-style engine with valued facts and stratified negation."""
from .engine import (
    AbsentValueError, EvaluationError, MaterializedKB, UnsafeQueryError, ValueConflictError,
    evaluate,
)
from .program import (
    Builtin, Clause, Literal, LogicProgram, ProgramError, StratificationError, format_clause,
    format_program, parse_logkb, parse_query,
)
from .._lexer import ParseError


def load_logkb(path) -> LogicProgram:
    with open(path, encoding="utf-8") as fh:
        return parse_logkb(fh.read(), source=str(path))


__all__ = [
    "AbsentValueError", "Builtin", "Clause", "EvaluationError", "Literal", "LogicProgram",
    "MaterializedKB", "ParseError", "ProgramError", "StratificationError", "UnsafeQueryError",
    "ValueConflictError", "evaluate", "format_clause", "format_program", "load_logkb",
    "parse_logkb", "parse_query",
]
