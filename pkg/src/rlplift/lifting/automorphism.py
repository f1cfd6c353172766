"""Fractional automorphisms and the characteristic matrix of a partition."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..lp.dualform import DualFormLP
from .colorpass import Partition


def _block_matrix(classes: list[list[int]], size: int) -> list[list[Fraction]]:
    X = [[Fraction(0)] * size for _ in range(size)]
    for members in classes:
        w = Fraction(1, len(members))
        for i in members:
            row = X[i]
            for j in members:
                row[j] = w
    return X


def fractional_automorphism(part: Partition) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """``(X_P, X_Q)``: entry ``1/|C|`` when both indices lie in the same class ``C``."""
    n = sum(len(c) for c in part.col_classes)
    m = sum(len(c) for c in part.row_classes)
    return _block_matrix(part.col_classes, n), _block_matrix(part.row_classes, m)


def check_fa_identities(lp: DualFormLP, part: Partition) -> dict[str, bool]:
    """Exact checks of ``X_Q A = A X_P``, ``c^T X_P = c^T`` and ``X_Q b = b``.

    Works on class sums instead of dense products: ``(A X_P)_ij`` is the mean
    of row ``i`` over the class of ``j``; ``(X_Q A)_ij`` the mean of column
    ``j`` over the class of ``i``.
    """
    pc = part.col_class_of()
    qc = part.row_class_of()
    sizes_p = [len(c) for c in part.col_classes]
    sizes_q = [len(c) for c in part.row_classes]
    # A X_P
    axp: list[dict] = []
    for r in lp.rows:
        sums: dict = {}
        for j, v in r.items():
            sums[pc[j]] = sums.get(pc[j], 0) + Fraction(v)
        axp.append(sums)
    # X_Q A: mean over the row class, per column
    qsum: list[dict] = [dict() for _ in sizes_q]
    for i, r in enumerate(lp.rows):
        acc = qsum[qc[i]]
        for j, v in r.items():
            acc[j] = acc.get(j, 0) + Fraction(v)
    ok_a = True
    for i, r in enumerate(lp.rows):
        # compare entries on the union of supports
        k = qc[i]
        cols = set(qsum[k]) | {j for cls in axp[i] for j in part.col_classes[cls]}
        for j in cols:
            left = qsum[k].get(j, 0) / sizes_q[k]
            right = axp[i].get(pc[j], 0) / sizes_p[pc[j]]
            if left != right:
                ok_a = False
                break
        if not ok_a:
            break
    cmean = [Fraction(0)] * len(sizes_p)
    for j, v in enumerate(lp.c):
        cmean[pc[j]] += Fraction(v)
    ok_c = all(Fraction(v) == cmean[pc[j]] / sizes_p[pc[j]] for j, v in enumerate(lp.c))
    bmean = [Fraction(0)] * len(sizes_q)
    for i, v in enumerate(lp.b):
        bmean[qc[i]] += Fraction(v)
    ok_b = all(Fraction(v) == bmean[qc[i]] / sizes_q[qc[i]] for i, v in enumerate(lp.b))
    return {"XQ_A_eq_A_XP": ok_a, "cT_XP_eq_cT": ok_c, "XQ_b_eq_b": ok_b}


@dataclass(frozen=True)
class CharMatrix:
    """The n x p matrix with entry ``1/sqrt(|P_m|)`` where column ``i`` lies in class ``P_m``.

    Stored structurally; entries are irrational in general, so exact work
    uses :meth:`squared` or the unnormalized incidence matrix.
    """

    class_of: tuple
    sizes: tuple

    @classmethod
    def from_partition(cls, part: Partition) -> "CharMatrix":
        return cls(tuple(part.col_class_of()), tuple(len(c) for c in part.col_classes))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.class_of), len(self.sizes))

    def dense(self) -> np.ndarray:
        B = np.zeros(self.shape)
        for i, k in enumerate(self.class_of):
            B[i, k] = 1.0 / math.sqrt(self.sizes[k])
        return B

    def incidence(self) -> list[list[int]]:
        """The unnormalized 0/1 class incidence matrix."""
        n, p = self.shape
        B = [[0] * p for _ in range(n)]
        for i, k in enumerate(self.class_of):
            B[i][k] = 1
        return B

    def squared(self) -> list[list[Fraction]]:
        """Entry-wise squares, exact: ``1/|P_m|`` or 0."""
        n, p = self.shape
        S = [[Fraction(0)] * p for _ in range(n)]
        for i, k in enumerate(self.class_of):
            S[i][k] = Fraction(1, self.sizes[k])
        return S

    def gram(self) -> list[list[Fraction]]:
        """``B^T B`` computed exactly; products of entries are nonzero only within a class."""
        p = len(self.sizes)
        G = [[Fraction(0)] * p for _ in range(p)]
        for k in self.class_of:
            G[k][k] += Fraction(1, self.sizes[k])
        return G

    def projector(self) -> list[list[Fraction]]:
        """``B B^T`` computed exactly; equals ``X_P``."""
        n = len(self.class_of)
        X = [[Fraction(0)] * n for _ in range(n)]
        for i, ki in enumerate(self.class_of):
            for j, kj in enumerate(self.class_of):
                if ki == kj:
                    X[i][j] = Fraction(1, self.sizes[ki])
        return X


def char_matrix(part: Partition) -> CharMatrix:
    return CharMatrix.from_partition(part)


__all__ = ["CharMatrix", "char_matrix", "check_fa_identities", "fractional_automorphism"]
