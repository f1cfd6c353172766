"""The relational linear programming language: syntax tree, parser, checks and prenex form."""
from .ast import (
    BinOp, Constraint, Definition, MULTISET, Neg, Num, Objective, Ref, RlpModel, SET, Sum,
    VarDecl,
)
from .parser import ModelError, ParseError, format_expr, format_model, load_rlp, parse_rlp
from .prenex import Monomial, PrenexError, to_prenex
from .validate import ValidationError, ValidationReport, validate

__all__ = [
    "BinOp", "Constraint", "Definition", "MULTISET", "ModelError", "Monomial", "Neg", "Num",
    "Objective", "ParseError", "PrenexError", "Ref", "RlpModel", "SET", "Sum",
    "ValidationError", "ValidationReport", "VarDecl", "format_expr", "format_model", "load_rlp",
    "parse_rlp", "to_prenex", "validate",
]
