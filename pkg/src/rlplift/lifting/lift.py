"""Lifted linear programming: reduce by an equitable partition, solve, unlift."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..grounder import SizeReport, stats
from ..lp.dualform import DualFormLP, check_feasible
from ..lp.simplex import OPTIMAL, Solution, solve
from .automorphism import CharMatrix
from .colorpass import Partition, color_passing
from .graph import build_coefficient_graph


class LiftingError(RuntimeError):
    """A soundness check failed; this indicates a bug, not a property of the input."""


@dataclass
class LiftedLP:
    lp: DualFormLP
    char: CharMatrix
    normalized: bool          # True: columns scaled by 1/sqrt|P|; False: 0/1 incidence
    row_map: list[int]        # lifted row -> original row it came from
    partition: Partition | None = None

    @property
    def p(self) -> int:
        return self.lp.n


def lift(lp: DualFormLP, part: Partition, dedup: bool = True, exact: bool | None = None) -> LiftedLP:
    """Build ``(A B, b, B^T c)``.

    With ``exact`` (default when the LP is rational) ``B`` is the 0/1
    incidence matrix, which keeps every entry rational; it differs from the
    normalized matrix only by a positive diagonal scaling of the lifted
    variables, so the lifted optimum is the same.  Otherwise ``B`` is the
    normalized characteristic matrix.
    """
    if exact is None:
        exact = lp.exact
    char = CharMatrix.from_partition(part)
    cls = char.class_of
    if exact:
        scale = [1] * len(char.sizes)
    else:
        scale = [1.0 / math.sqrt(s) for s in char.sizes]

    def project(row: dict) -> dict:
        out: dict = {}
        for j, v in row.items():
            k = cls[j]
            out[k] = out.get(k, 0) + v
        return {k: v * scale[k] for k, v in sorted(out.items()) if v}

    c = [0] * len(char.sizes)
    for j, v in enumerate(lp.c):
        c[cls[j]] += v
    c = [v * s for v, s in zip(c, scale)]
    if exact:
        c = [Fraction(v) for v in c]

    rows, b, prov, row_map = [], [], [], []
    if dedup:
        for members in part.row_classes:
            first = members[0]
            proj = project(lp.rows[first])
            if exact:
                # equitability makes projected rows within a class coincide
                for i in members[1:]:
                    if lp.b[i] != lp.b[first] or project(lp.rows[i]) != proj:
                        raise LiftingError(f"rows {first} and {i} share a class but differ "
                                           "after projection; the partition is not equitable")
            rows.append(proj)
            b.append(lp.b[first])
            prov.append(lp.row_provenance[first] if lp.row_provenance else f"row {first}")
            row_map.append(first)
    else:
        for i, r in enumerate(lp.rows):
            rows.append(project(r))
            b.append(lp.b[i])
            prov.append(lp.row_provenance[i] if lp.row_provenance else f"row {i}")
            row_map.append(i)

    names = []
    for members in part.col_classes:
        base = lp.col_names[members[0]] if lp.col_names else f"x{members[0]}"
        names.append(base if len(members) == 1 else f"{base}+{len(members) - 1}")
    lifted = DualFormLP(rows, b, c, names, prov, lp.sign, lp.offset)
    return LiftedLP(lifted, char, not exact, row_map, part)


def unlift(lifted: LiftedLP, y) -> list:
    """``x = B y``: every column takes its class's value (scaled when normalized)."""
    if len(y) != lifted.p:
        raise ValueError(f"lifted point has {len(y)} entries, expected {lifted.p}")
    char = lifted.char
    if lifted.normalized:
        vals = [float(v) / math.sqrt(s) for v, s in zip(y, char.sizes)]
    else:
        vals = list(y)
    return [vals[k] for k in char.class_of]


@dataclass
class LiftReport:
    ground: SizeReport
    lifted: SizeReport
    rounds: int
    times_ms: dict = field(default_factory=dict)
    verified: bool = False
    col_classes: int = 0
    row_classes: int = 0

    @property
    def ratio(self) -> float:
        return self.lifted.vars / self.ground.vars if self.ground.vars else 1.0

    def to_json(self, timings: bool = True) -> dict:
        keys = ("graph", "colorpass", "lift", "solve", "unlift")
        return {
            "ground": self.ground._asdict(),
            "lifted": self.lifted._asdict(),
            "rounds": self.rounds,
            "times_ms": {k: (round(self.times_ms.get(k, 0.0), 3) if timings else None)
                         for k in keys},
            "verified": self.verified,
        }


def lift_lp(lp: DualFormLP, dedup: bool = True, color_eps: float | None = None,
            exact: bool | None = None, times: dict | None = None) -> LiftedLP:
    """Coefficient graph, color passing and projection in one call."""
    times = {} if times is None else times
    t0 = time.perf_counter()
    g = build_coefficient_graph(lp, color_eps)
    t1 = time.perf_counter()
    part = color_passing(g)
    t2 = time.perf_counter()
    lifted = lift(lp, part, dedup, exact)
    t3 = time.perf_counter()
    times.update(graph=(t1 - t0) * 1e3, colorpass=(t2 - t1) * 1e3, lift=(t3 - t2) * 1e3)
    return lifted


def lifted_solve(lp: DualFormLP, mode: str = "rational", dedup: bool = True,
                 color_eps: float | None = None, tol: float = 1e-9, solver=None,
                 **solve_args) -> tuple[Solution, LiftReport]:
    """Lift, solve the reduced LP, unlift and verify the ground point.

    ``solver`` overrides the solve step (a callable taking a DualFormLP).
    Verification failure raises :class:`LiftingError`.
    """
    times: dict = {}
    run = solver or (lambda l: solve(l, mode, **solve_args))
    ground_size = stats(lp)
    if lp.n == 0 or lp.m == 0:
        t0 = time.perf_counter()
        sol = run(lp)
        times["solve"] = (time.perf_counter() - t0) * 1e3
        report = LiftReport(ground_size, ground_size, 0, times, sol.status == OPTIMAL,
                            lp.n, lp.m)
        return sol, report

    exact = mode == "rational" and lp.exact
    lifted = lift_lp(lp, dedup, color_eps, exact, times)
    part = lifted.partition
    report = LiftReport(ground_size, stats(lifted.lp), part.rounds, times,
                        col_classes=part.p, row_classes=part.q)
    t0 = time.perf_counter()
    ysol = run(lifted.lp)
    times["solve"] = (time.perf_counter() - t0) * 1e3
    if ysol.status != OPTIMAL:
        return Solution(ysol.status, iterations=ysol.iterations, mode=ysol.mode,
                        message=ysol.message), report
    t0 = time.perf_counter()
    x = unlift(lifted, ysol.x)
    times["unlift"] = (time.perf_counter() - t0) * 1e3

    obj = lp.objective(x)
    if exact:
        feas = check_feasible(lp, x, 0)
        same = obj == ysol.objective
    else:
        scale = 1.0 + max((abs(float(v)) for v in lp.b), default=0.0)
        feas = check_feasible(lp, x, tol * scale)
        same = abs(float(obj) - float(ysol.objective)) <= 1e-6 * (1.0 + abs(float(obj)))
    if not feas.ok:
        raise LiftingError(f"unlifted point violates {feas.provenance} by {feas.violation}")
    if not same:
        raise LiftingError(f"lifted objective {ysol.objective} differs from ground "
                           f"objective {obj} of the unlifted point")
    report.verified = True
    return Solution(OPTIMAL, x, obj, ysol.iterations, ysol.mode), report


__all__ = ["LiftReport", "LiftedLP", "LiftingError", "lift", "lift_lp", "lifted_solve", "unlift"]
