"""Symmetry detection by color passing and lifted solving of LPs."""
from .automorphism import CharMatrix, char_matrix, check_fa_identities, fractional_automorphism
from .colorpass import Equitability, Partition, color_passing, verify_equitable
from .graph import CoefficientGraph, build_coefficient_graph
from .lift import LiftedLP, LiftingError, LiftReport, lift, lift_lp, lifted_solve, unlift

__all__ = [
    "CharMatrix", "CoefficientGraph", "Equitability", "LiftReport", "LiftedLP", "LiftingError",
    "Partition", "build_coefficient_graph", "char_matrix", "check_fa_identities",
    "color_passing", "fractional_automorphism", "lift", "lift_lp", "lifted_solve", "unlift",
    "verify_equitable",
]
