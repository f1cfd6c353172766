"""The colored bipartite coefficient graph of a dual-form LP."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..lp.dualform import DualFormLP


def _bucket(v, eps):
    if eps is None:
        return Fraction(v) if isinstance(v, float) else v
    # unsafe when a bucket merges unequal values; off by default
    return round(float(v) / eps)


@dataclass
class CoefficientGraph:
    """Vertices ``0..n-1`` are columns, ``n..n+m-1`` are rows.

    ``colors`` holds the initial vertex colors (column colors come from ``c``,
    row colors from ``b``, the two ranges are disjoint); ``edges`` lists
    ``(row, column, edge color)`` with the color naming the exact value of
    ``A[row, column]``.
    """

    n: int
    m: int
    colors: np.ndarray
    edges: list = field(default_factory=list)
    col_values: list = field(default_factory=list)   # color id -> c value
    row_values: list = field(default_factory=list)   # color id - len(col_values) -> b value
    edge_values: list = field(default_factory=list)  # edge color id -> A value
    _csr: tuple | None = field(default=None, repr=False)

    @property
    def num_vertices(self) -> int:
        return self.n + self.m

    def col_vertex(self, j: int) -> int:
        return j

    def row_vertex(self, i: int) -> int:
        return self.n + i

    def csr(self):
        """Symmetric adjacency as (indptr, indices, edge colors), int64 arrays."""
        if self._csr is None:
            nv = self.num_vertices
            if self.edges:
                e = np.asarray(self.edges, dtype=np.int64)
                src = np.concatenate([e[:, 0] + self.n, e[:, 1]])
                dst = np.concatenate([e[:, 1], e[:, 0] + self.n])
                col = np.concatenate([e[:, 2], e[:, 2]])
            else:
                src = dst = col = np.zeros(0, dtype=np.int64)
            order = np.lexsort((dst, src))
            src, dst, col = src[order], dst[order], col[order]
            indptr = np.zeros(nv + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            indptr = np.cumsum(indptr)
            self._csr = (indptr, np.ascontiguousarray(dst), np.ascontiguousarray(col))
        return self._csr

    def neighbors(self, v: int):
        indptr, indices, ecol = self.csr()
        a, b = indptr[v], indptr[v + 1]
        return list(zip(indices[a:b].tolist(), ecol[a:b].tolist()))


def build_coefficient_graph(lp: DualFormLP, color_eps: float | None = None) -> CoefficientGraph:
    col_ids: dict = {}
    colors = []
    for v in lp.c:
        colors.append(col_ids.setdefault(_bucket(v, color_eps), len(col_ids)))
    row_ids: dict = {}
    base = len(col_ids)
    for v in lp.b:
        colors.append(base + row_ids.setdefault(_bucket(v, color_eps), len(row_ids)))
    edge_ids: dict = {}
    edges = []
    for i, r in enumerate(lp.rows):
        for j in sorted(r):
            v = r[j]
            if v == 0:
                continue
            edges.append((i, j, edge_ids.setdefault(_bucket(v, color_eps), len(edge_ids))))

    def values(ids):
        out = [None] * len(ids)
        for k, c in ids.items():
            out[c] = k
        return out

    if color_eps is None:
        col_values, row_values, edge_values = values(col_ids), values(row_ids), values(edge_ids)
    else:
        col_values = [k * color_eps for k in values(col_ids)]
        row_values = [k * color_eps for k in values(row_ids)]
        edge_values = [k * color_eps for k in values(edge_ids)]
    return CoefficientGraph(lp.n, lp.m, np.asarray(colors, dtype=np.int64), edges,
                            col_values, row_values, edge_values)


__all__ = ["CoefficientGraph", "build_coefficient_graph"]
