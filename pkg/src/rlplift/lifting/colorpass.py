"""Color passing: the coarsest equitable partition refining the initial colors."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..kernels import refine_round
from .graph import CoefficientGraph


def _canonical(colors: np.ndarray) -> np.ndarray:
    # renumber by first occurrence in vertex order
    _, first, inv = np.unique(colors, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv.reshape(-1)]


@dataclass
class Partition:
    """Column classes P and row classes Q, each ordered by its smallest member."""

    col_classes: list[list[int]]
    row_classes: list[list[int]]
    rounds: int = 0

    @property
    def p(self) -> int:
        return len(self.col_classes)

    @property
    def q(self) -> int:
        return len(self.row_classes)

    def col_class_of(self) -> list[int]:
        out = [0] * sum(len(c) for c in self.col_classes)
        for k, members in enumerate(self.col_classes):
            for j in members:
                out[j] = k
        return out

    def row_class_of(self) -> list[int]:
        out = [0] * sum(len(c) for c in self.row_classes)
        for k, members in enumerate(self.row_classes):
            for i in members:
                out[i] = k
        return out

    @classmethod
    def from_labels(cls, col_labels, row_labels, rounds: int = 0) -> "Partition":
        return cls(_classes(col_labels), _classes(row_labels), rounds)

    @classmethod
    def discrete(cls, n: int, m: int) -> "Partition":
        return cls([[j] for j in range(n)], [[i] for i in range(m)])


def _classes(labels) -> list[list[int]]:
    groups: dict = {}
    for v, c in enumerate(labels):
        groups.setdefault(c, []).append(v)
    return list(groups.values())


def color_passing(g: CoefficientGraph, max_rounds: int | None = None) -> Partition:
    """Refine until stable; ``rounds`` counts the rounds that split a class."""
    colors = _canonical(g.colors) if g.num_vertices else g.colors
    count = len(np.unique(colors))
    indptr, indices, ecol = g.csr()
    rounds = 0
    limit = g.num_vertices if max_rounds is None else max_rounds
    while rounds < limit:
        new, k = refine_round(colors, indptr, indices, ecol)
        if k == count:
            break
        colors, count = new, k
        rounds += 1
    colors = colors.tolist()
    return Partition.from_labels(colors[:g.n], colors[g.n:], rounds)


class Equitability(NamedTuple):
    ok: bool
    witness: tuple | None  # (vertex, vertex, target class, edge color); vertices as ("col"|"row", index)


def verify_equitable(g: CoefficientGraph, part: Partition) -> Equitability:
    """Definitional check: members of a class see the same per-color edge counts into every class."""
    n = g.n
    label = {}
    for k, members in enumerate(part.col_classes):
        for j in members:
            if not 0 <= j < n:
                raise ValueError(f"column class {k} holds an invalid column {j}")
            label[j] = ("col", k)
    for k, members in enumerate(part.row_classes):
        for i in members:
            if not 0 <= i < g.m:
                raise ValueError(f"row class {k} holds an invalid row {i}")
            label[n + i] = ("row", k)
    if len(label) != g.num_vertices:
        raise ValueError("partition does not cover every vertex exactly once")

    def name(v):
        return ("col", v) if v < n else ("row", v - n)

    targets = [("col", k) for k in range(part.p)] + [("row", k) for k in range(part.q)]
    edge_colors = sorted(set(range(len(g.edge_values))))
    classes = [list(c) for c in part.col_classes] + [[n + i for i in c] for c in part.row_classes]
    for members in classes:
        profiles = []
        for v in members:
            profiles.append(Counter((label[u], ec) for u, ec in g.neighbors(v)))
        first = profiles[0]
        for v, prof in zip(members[1:], profiles[1:]):
            if prof == first:
                continue
            for t in targets:
                for ec in edge_colors:
                    if first[(t, ec)] != prof[(t, ec)]:
                        return Equitability(False, (name(members[0]), name(v), t, ec))
        for v in members[1:]:
            if g.colors[v] != g.colors[members[0]]:
                return Equitability(False, (name(members[0]), name(v), None, None))
    return Equitability(True, None)


__all__ = ["Equitability", "Partition", "color_passing", "verify_equitable"]
