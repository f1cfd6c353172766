"""Two-phase primal simplex for ``minimize c.x subject to A x <= b`` with free ``x``.

Free variables are split as ``x = x+ - x-`` and every row gets a slack;
rows with a negative right-hand side get an artificial variable for phase 1.
Column layout: ``x+`` (n), ``x-`` (n), slacks (m), artificials.

Two arithmetic modes share the algorithm: ``rational`` keeps sparse rows of
:class:`~fractions.Fraction` and is exact; ``float`` uses a dense numpy
tableau.  Bland's rule is the default pricing; ``dantzig`` picks the most
negative reduced cost and falls back to Bland's rule during degenerate
stretches so it cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..kernels import pivot_dense
from .dualform import DualFormLP

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

DEFAULT_MAX_ITER = 10**6
FLOAT_EPS = 1e-9
_DEGENERATE_STREAK = 50


@dataclass
class Solution:
    status: str
    x: list | None = None
    objective: object = None  # c.x of the dual-form LP
    iterations: int = 0
    mode: str = "rational"
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Pricing:
    def __init__(self, rule: str):
        if rule not in ("bland", "dantzig"):
            raise ValueError(f"unknown pricing rule {rule!r}")
        self.rule = rule
        self.streak = 0

    @property
    def bland(self) -> bool:
        return self.rule == "bland" or self.streak >= _DEGENERATE_STREAK

    def record(self, degenerate: bool) -> None:
        self.streak = self.streak + 1 if degenerate else 0


def _trivial(lp: DualFormLP, zero):
    # no columns: feasible iff 0 <= b
    if lp.n == 0:
        if all(bi >= 0 for bi in lp.b):
            return Solution(OPTIMAL, [], zero)
        return Solution(INFEASIBLE)
    return None


# ---------------------------------------------------------------------------
# rational mode

def _solve_rational(lp: DualFormLP, pricing: str, max_iter: int) -> Solution:
    zero = Fraction(0)
    triv = _trivial(lp, zero)
    if triv is not None:
        return triv
    n, m = lp.n, lp.m
    nstruct = 2 * n + m
    rows: list[dict] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    art = nstruct
    for i, (r, bi) in enumerate(zip(lp.rows, lp.b)):
        row = {}
        for j, v in r.items():
            v = Fraction(v)
            if v:
                row[j] = v
                row[n + j] = -v
        row[2 * n + i] = Fraction(1)
        bi = Fraction(bi)
        if bi < 0:
            row = {k: -v for k, v in row.items()}
            bi = -bi
            row[art] = Fraction(1)
            basis.append(art)
            art += 1
        else:
            basis.append(2 * n + i)
        rows.append(row)
        rhs.append(bi)

    price = _Pricing(pricing)
    iters = 0

    def run(d: dict, allowed_max: int) -> str:
        nonlocal iters
        while True:
            if price.bland:
                e = min((j for j, v in d.items() if v < 0 and j < allowed_max), default=None)
            else:
                cand = [(v, j) for j, v in d.items() if v < 0 and j < allowed_max]
                e = min(cand)[1] if cand else None
            if e is None:
                return OPTIMAL
            if iters >= max_iter:
                return ITERATION_LIMIT
            best = None
            for i, row in enumerate(rows):
                a = row.get(e)
                if a is not None and a > 0:
                    key = (rhs[i] / a, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            r = best[1]
            price.record(rhs[r] == 0)
            _pivot_rational(rows, rhs, d, basis, r, e)
            iters += 1

    # phase 1: minimize the sum of artificials
    if art > nstruct:
        d: dict = {}
        for i, row in enumerate(rows):
            if basis[i] >= nstruct:
                for k, v in row.items():
                    if k < nstruct:
                        d[k] = d.get(k, zero) - v
        d = {k: v for k, v in d.items() if v}
        status = run(d, nstruct)
        if status == ITERATION_LIMIT:
            return Solution(status, iterations=iters, message="phase 1 pivot limit reached")
        infeas = sum((rhs[i] for i in range(len(rows)) if basis[i] >= nstruct), zero)
        if infeas > 0:
            return Solution(INFEASIBLE, iterations=iters)
        # drive remaining (zero-level) artificials out of the basis
        i = 0
        while i < len(rows):
            if basis[i] >= nstruct:
                k = min((k for k in rows[i] if k < nstruct), default=None)
                if k is None:  # redundant row
                    del rows[i], rhs[i], basis[i]
                    continue
                _pivot_rational(rows, rhs, {}, basis, i, k)
            i += 1
        for row in rows:
            for k in [k for k in row if k >= nstruct]:
                del row[k]

    # phase 2
    cost = {}
    for j, v in enumerate(lp.c):
        v = Fraction(v)
        if v:
            cost[j] = v
            cost[n + j] = -v
    d = dict(cost)
    for i, row in enumerate(rows):
        cb = cost.get(basis[i])
        if cb:
            for k, v in row.items():
                nv = d.get(k, zero) - cb * v
                if nv:
                    d[k] = nv
                else:
                    d.pop(k, None)
    status = run(d, nstruct)
    if status != OPTIMAL:
        return Solution(status, iterations=iters)
    vals = [zero] * nstruct
    for i, bv in enumerate(basis):
        vals[bv] = rhs[i]
    x = [vals[j] - vals[n + j] for j in range(n)]
    obj = sum((Fraction(c) * xj for c, xj in zip(lp.c, x)), zero)
    return Solution(OPTIMAL, x, obj, iters, "rational")


def _pivot_rational(rows, rhs, d, basis, r, e) -> None:
    prow = rows[r]
    piv = prow[e]
    if piv != 1:
        inv = 1 / piv
        for k in prow:
            prow[k] *= inv
        rhs[r] *= inv
    items = list(prow.items())
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row.get(e)
        if f is None:
            continue
        for k, v in items:
            nv = row.get(k, 0) - f * v
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)
        rhs[i] -= f * rhs[r]
    f = d.get(e)
    if f:
        for k, v in items:
            nv = d.get(k, 0) - f * v
            if nv:
                d[k] = nv
            else:
                d.pop(k, None)
    basis[r] = e


# ---------------------------------------------------------------------------
# float mode

REFACTOR_EVERY = 64


class _FloatTableau:
    """Dense tableau over a fixed constraint matrix ``M`` with periodic refactorization.

    Rebuilding ``B^-1 M`` from the basis every few pivots keeps rounding
    errors from compounding along long degenerate pivot sequences.
    """

    def __init__(self, M: np.ndarray, rhs0: np.ndarray, basis: np.ndarray, eps: float):
        self.M = M
        self.rhs0 = rhs0
        self.basis = basis
        self.eps = eps
        self.refactor()

    def refactor(self, cost: np.ndarray | None = None) -> None:
        Bm = self.M[:, self.basis]
        self.T = np.ascontiguousarray(np.linalg.solve(Bm, self.M))
        rhs = np.linalg.solve(Bm, self.rhs0)
        rhs[np.abs(rhs) < self.eps] = 0.0
        self.rhs = rhs
        # snap unit columns of the basis so pivots start from clean identities
        self.T[:, self.basis] = np.eye(len(self.basis))
        if cost is not None:
            self.d = cost - cost[self.basis] @ self.T
            self.d[self.basis] = 0.0

    def values(self) -> np.ndarray:
        vals = np.zeros(self.M.shape[1])
        vals[self.basis] = np.linalg.solve(self.M[:, self.basis], self.rhs0)
        return vals


def _solve_float(lp: DualFormLP, pricing: str, max_iter: int, eps: float) -> Solution:
    triv = _trivial(lp, 0.0)
    if triv is not None:
        triv.mode = "float"
        return triv
    n, m = lp.n, lp.m
    A = lp.matrix().toarray()
    b = np.array([float(v) for v in lp.b])
    neg = b < 0
    nart = int(neg.sum())
    nstruct = 2 * n + m
    M = np.zeros((m, nstruct + nart))
    M[:, :n] = A
    M[:, n:2 * n] = -A
    M[:, 2 * n:nstruct] = np.eye(m)
    rhs0 = b.copy()
    M[neg] *= -1
    rhs0[neg] *= -1
    basis = np.arange(2 * n, nstruct)
    art_rows = np.nonzero(neg)[0]
    for k, i in enumerate(art_rows):
        M[i, nstruct + k] = 1.0
        basis[i] = nstruct + k
    price = _Pricing(pricing)
    iters = 0
    piv_tol = max(eps, 1e-9)

    def run(tab: _FloatTableau, cost: np.ndarray, allowed_max: int) -> str:
        nonlocal iters
        tab.refactor(cost)
        scale = max(1.0, float(np.abs(cost).max(initial=0.0)))
        since = 0
        while True:
            if since >= REFACTOR_EVERY:
                tab.refactor(cost)
                since = 0
            T, rhs, d = tab.T, tab.rhs, tab.d
            dd = d[:allowed_max]
            if price.bland:
                cand = np.nonzero(dd < -eps * scale)[0]
                if not len(cand):
                    return OPTIMAL
                e = int(cand[0])
            else:
                e = int(np.argmin(dd))
                if dd[e] >= -eps * scale:
                    return OPTIMAL
            if iters >= max_iter:
                return ITERATION_LIMIT
            col = T[:, e]
            pos = np.nonzero(col > piv_tol)[0]
            if not len(pos):
                return UNBOUNDED
            ratios = np.maximum(rhs[pos], 0.0) / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + eps * max(1.0, abs(best))]
            if price.bland:
                r = int(ties[np.argmin(tab.basis[ties])])
            else:
                r = int(ties[np.argmax(col[ties])])
            price.record(rhs[r] <= eps)
            pivot_dense(T, rhs, d, r, e)
            tab.basis[r] = e
            iters += 1
            since += 1

    if nart:
        tab = _FloatTableau(M, rhs0, basis, eps)
        cost1 = np.zeros(M.shape[1])
        cost1[nstruct:] = 1.0
        status = run(tab, cost1, nstruct)
        if status == ITERATION_LIMIT:
            return Solution(status, iterations=iters, mode="float")
        tab.refactor(cost1)
        infeas = tab.rhs[tab.basis >= nstruct].sum()
        if infeas > max(1e-7, 1e-9 * float(np.abs(b).max(initial=1.0))):
            return Solution(INFEASIBLE, iterations=iters, mode="float")
        keep = np.ones(m, dtype=bool)
        T, basis = tab.T, tab.basis
        for i in np.nonzero(basis >= nstruct)[0]:
            row = np.abs(T[i, :nstruct])
            j = int(np.argmax(row))
            if row[j] <= 1e-7:
                keep[i] = False      # redundant row
                continue
            pivot_dense(T, tab.rhs, np.zeros(T.shape[1]), int(i), j)
            basis[i] = j
        M2 = np.ascontiguousarray(M[keep, :nstruct])
        tab = _FloatTableau(M2, rhs0[keep], basis[keep].copy(), eps)
    else:
        tab = _FloatTableau(M, rhs0, basis, eps)
    cost = np.zeros(nstruct)
    c = np.array([float(v) for v in lp.c])
    cost[:n] = c
    cost[n:2 * n] = -c
    status = run(tab, cost, nstruct)
    if status != OPTIMAL:
        return Solution(status, iterations=iters, mode="float")
    vals = tab.values()
    x = vals[:n] - vals[n:2 * n]
    return Solution(OPTIMAL, x.tolist(), float(c @ x), iters, "float")


# ---------------------------------------------------------------------------
# HiGHS through scipy

def _solve_highs(lp: DualFormLP) -> Solution:
    from scipy.optimize import linprog

    triv = _trivial(lp, 0.0)
    if triv is not None:
        triv.mode = "highs"
        return triv
    c = np.array([float(v) for v in lp.c])
    if lp.m:
        res = linprog(c, A_ub=lp.matrix(), b_ub=np.array([float(v) for v in lp.b]),
                      bounds=(None, None), method="highs")
    else:
        res = linprog(c, bounds=(None, None), method="highs")
    status = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status)
    if status is None:
        return Solution("error", mode="highs", message=res.message)
    if status != OPTIMAL:
        return Solution(status, mode="highs", message=res.message)
    return Solution(OPTIMAL, res.x.tolist(), float(res.fun), int(getattr(res, "nit", 0)), "highs")


def solve(lp: DualFormLP, mode: str = "rational", pricing: str = "bland",
          max_iter: int = DEFAULT_MAX_ITER, eps: float = FLOAT_EPS) -> Solution:
    """Solve a dual-form LP; ``mode`` is ``rational``, ``float`` or ``highs``."""
    if mode == "rational":
        if not lp.exact:
            raise ValueError("rational mode needs exact coefficients; use mode='float'")
        return _solve_rational(lp, pricing, max_iter)
    if mode == "float":
        return _solve_float(lp, pricing, max_iter, eps)
    if mode == "highs":
        return _solve_highs(lp)
    raise ValueError(f"unknown solver mode {mode!r}")


__all__ = ["INFEASIBLE", "ITERATION_LIMIT", "OPTIMAL", "Solution", "UNBOUNDED", "solve"]
