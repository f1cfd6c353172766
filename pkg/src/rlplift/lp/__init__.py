"""LP normal forms, the simplex solver, feasibility checks and file export."""
from .dualform import DualFormLP, Feasibility, check_feasible, to_dual_form
from .export import Exported, export
from .external import ExternalSolverError, solve_external
from .simplex import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, Solution, solve

__all__ = [
    "DualFormLP", "Exported", "ExternalSolverError", "Feasibility", "INFEASIBLE",
    "ITERATION_LIMIT", "OPTIMAL", "Solution", "UNBOUNDED", "check_feasible", "export", "solve",
    "solve_external", "to_dual_form",
]
