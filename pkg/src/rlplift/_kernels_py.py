"""Pure-Python versions of the hot loops; used when the compiled module is absent."""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def pivot_dense(T, rhs, d, r: int, e: int) -> None:
    """Pivot the float tableau ``T`` (with right-hand side and reduced costs) on ``(r, e)`` in place."""
    piv = T[r, e]
    T[r, :] /= piv
    rhs[r] /= piv
    col = T[:, e].copy()
    col[r] = 0.0
    nz = np.nonzero(col)[0]
    if len(nz):
        T[nz, :] -= np.outer(col[nz], T[r, :])
        rhs[nz] -= col[nz] * rhs[r]
    f = d[e]
    if f != 0.0:
        d -= f * T[r, :]


def refine_round(colors, indptr, indices, ecolors):
    """One round of color refinement with exact signatures.

    A vertex's signature is its color plus the sorted multiset of
    (neighbor color, edge color) pairs.  New colors are numbered by first
    occurrence in vertex order.  Returns ``(new_colors, number_of_colors)``.
    """
    n = len(colors)
    out = np.empty(n, dtype=np.int64)
    table: dict = {}
    cl = colors.tolist()
    ip = indptr.tolist()
    idx = indices.tolist()
    ec = ecolors.tolist()
    for v in range(n):
        a, b = ip[v], ip[v + 1]
        nbrs = sorted(zip([cl[u] for u in idx[a:b]], ec[a:b]))
        sig = (cl[v], tuple(nbrs))
        c = table.get(sig)
        if c is None:
            c = table[sig] = len(table)
        out[v] = c
    return out, len(table)
