"""The dual form ``minimize c.x subject to A x <= b`` and feasibility checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from ..grounder import GroundLP


@dataclass
class DualFormLP:
    """Sparse rows of ``A`` (column -> value), with ``b`` and ``c``; variables are free.

    ``sign`` and ``offset`` map the dual-form objective back to the original
    model: ``original = sign * c.x + offset``.
    """

    rows: list[dict] = field(default_factory=list)
    b: list = field(default_factory=list)
    c: list = field(default_factory=list)
    col_names: list[str] = field(default_factory=list)
    row_provenance: list[str] = field(default_factory=list)
    sign: int = 1
    offset: Fraction = Fraction(0)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def exact(self) -> bool:
        vals = [v for r in self.rows for v in r.values()] + list(self.b) + list(self.c)
        return all(isinstance(v, (int, Fraction)) for v in vals)

    def original_objective(self, value):
        return self.sign * value + (self.offset if isinstance(value, Fraction) else float(self.offset))

    def matrix(self) -> sp.csr_matrix:
        data, ri, ci = [], [], []
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                ri.append(i)
                ci.append(j)
                data.append(float(v))
        return sp.csr_matrix((data, (ri, ci)), shape=(self.m, self.n))

    def dense(self) -> list[list]:
        zero = Fraction(0) if self.exact else 0.0
        out = [[zero] * self.n for _ in range(self.m)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def objective(self, x: Sequence):
        return sum((cj * xj for cj, xj in zip(self.c, x) if cj), Fraction(0) if self.exact else 0.0)


def to_dual_form(lp: GroundLP) -> DualFormLP:
    """Maximization becomes minimization of ``-c``; ``=`` splits in two; ``>=`` is negated."""
    sign = -1 if lp.sense == "maximize" else 1
    out = DualFormLP(c=[sign * v for v in lp.c], col_names=lp.names(), sign=sign,
                     offset=lp.offset)
    for i, r in enumerate(lp.rows):
        where = r.provenance or f"row {i}"
        if r.rel in ("<=", "="):
            out.rows.append(dict(r.coeffs))
            out.b.append(r.rhs)
            out.row_provenance.append(where if r.rel == "<=" else f"{where} (=, upper)")
        if r.rel in (">=", "="):
            out.rows.append({j: -v for j, v in r.coeffs.items()})
            out.b.append(-r.rhs)
            out.row_provenance.append(where if r.rel == ">=" else f"{where} (=, lower)")
    return out


class Feasibility(NamedTuple):
    ok: bool
    violation: object  # max(Ax - b), 0 when every row holds
    row: int | None    # index of the worst row, None for an LP without rows
    provenance: str | None


def check_feasible(lp: DualFormLP, x: Sequence, tol=1e-9) -> Feasibility:
    if len(x) != lp.n:
        raise ValueError(f"point has {len(x)} entries, LP has {lp.n} columns")
    worst, worst_row = None, None
    for i, (r, bi) in enumerate(zip(lp.rows, lp.b)):
        lhs = sum((v * x[j] for j, v in r.items()), 0)
        viol = lhs - bi
        if worst is None or viol > worst:
            worst, worst_row = viol, i
    if worst is None:
        return Feasibility(True, 0, None, None)
    shown = max(worst, 0) if isinstance(worst, Fraction) else max(float(worst), 0.0)
    ok = math.isinf(tol) or worst <= tol
    return Feasibility(ok, shown, worst_row, lp.row_provenance[worst_row] if lp.row_provenance else None)


__all__ = ["DualFormLP", "Feasibility", "check_feasible", "to_dual_form"]
