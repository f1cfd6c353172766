"""Instance generators: gridworld and smokers-grid knowledge bases, Frucht and planted-symmetry LPs."""
from __future__ import annotations

from fractions import Fraction

import networkx as nx
import numpy as np

from ..lp.dualform import DualFormLP

_GRID_RULES = """\
action(up).  action(down).  action(left).  action(right).

move(state(X, Y), right, state(X1, Y)) :- coord(X), coord(Y), coord(X1), X1 == X + 1.
move(state(X, Y), left, state(X1, Y)) :- coord(X), coord(Y), coord(X1), X1 == X - 1.
move(state(X, Y), up, state(X, Y1)) :- coord(X), coord(Y), coord(Y1), Y1 == Y + 1.
move(state(X, Y), down, state(X, Y1)) :- coord(X), coord(Y), coord(Y1), Y1 == Y - 1.
% bumping into the border leaves the agent where it is
move(state(X, Y), right, state(X, Y)) :- coord(X), coord(Y), X == n.
move(state(X, Y), left, state(X, Y)) :- coord(X), coord(Y), X == 1.
move(state(X, Y), up, state(X, Y)) :- coord(X), coord(Y), Y == n.
move(state(X, Y), down, state(X, Y)) :- coord(X), coord(Y), Y == 1.

% goals are absorbing and pay nothing once reached
transProb(S, T, A) = 1 :- move(S, A, T), not goal(S).
transProb(S, S, A) = 1 :- goal(S), action(A).

reward(S, A) = 100 :- move(S, A, T), goal(T), not goal(S).
reward(S, A) = -1 :- move(S, A, T), not goal(T), not goal(S).
reward(S, A) = 0 :- goal(S), action(A).
"""


def gridworld_lkb(n: int, goals: int = 1, gamma: str = "0.9") -> str:
    """LogKB text for an ``n`` x ``n`` gridworld with a goal in the upper-right
    corner (``goals=1``) or in all four corners (``goals=4``)."""
    if goals not in (1, 4):
        raise ValueError("goals must be 1 or 4")
    if n < 2:
        raise ValueError("grid needs n >= 2")
    corners = [(n, n)] if goals == 1 else [(1, 1), (1, n), (n, 1), (n, n)]
    lines = [f"% {n} x {n} gridworld, {goals} goal state{'s' if goals > 1 else ''}.",
             f"n = {n}.", f"gamma = {gamma}.", ""]
    lines.append("  ".join(f"coord({i})." for i in range(1, n + 1)))
    lines.append("  ".join(f"goal(state({x}, {y}))." for x, y in corners))
    lines.append("")
    return "\n".join(lines) + _GRID_RULES


def smokers_grid_lkb(k: int, single: str = "0.5", pair: str = "0.75") -> str:
    """Pairwise smokers MLN on a ``k`` x ``k`` grid of people; each person is a
    friend of its right and upper neighbour, and all potentials are identical."""
    lines = [f"% {k} x {k} grid of people with identical pairwise and singleton potentials.",
             "value(0).  value(1).", ""]
    people = [f"p{i}_{j}" for i in range(k) for j in range(k)]
    for row in range(0, len(people), k):
        lines.append("  ".join(f"person({p})." for p in people[row:row + k]))
    lines.append("")
    for i in range(k):
        for j in range(k):
            if i + 1 < k:
                lines.append(f"friends(p{i}_{j}, p{i + 1}_{j}).")
            if j + 1 < k:
                lines.append(f"friends(p{i}_{j}, p{i}_{j + 1}).")
    lines += [
        "",
        f"w(smokes(X), 1) = {single} :- person(X).",
        "w(smokes(X), 0) = 0 :- person(X).",
        "",
        "w(smokes(X), smokes(Y), 1, 0) = 0 :- friends(X, Y).",
        f"w(smokes(X), smokes(Y), V1, V2) = {pair} :- friends(X, Y), value(V1), value(V2).",
        "",
    ]
    return "\n".join(lines)


def cora_mini_lkb(docs: int = 60, words: int = 12, seed: int = 0) -> str:
    """Synthetic bag-of-words corpus for the plain LP-SVM with the original
    trade-off ``const = 0.021``.  Enough documents are labeled for the margin
    to stay bounded (``0.021 * labeled >= 1``), and word vectors are drawn from
    a few prototypes so identical documents give the LP some symmetry."""
    if docs * 0.021 < 1:
        raise ValueError("need at least 48 labeled documents for a bounded LP")
    rng = np.random.default_rng(seed)
    protos = [sorted(rng.choice(words, size=int(rng.integers(2, 5)), replace=False).tolist())
              for _ in range(6)]
    lines = [f"% {docs} synthetic documents over {words} words.", "const = 0.021.", ""]
    labels = []
    for d in range(docs):
        k = int(rng.integers(len(protos)))
        doc = 1000 + d
        lines.append("  ".join(f"attribute({doc}, {w})." for w in protos[k]))
        labels.append(f"label({doc}) = {1 if k % 2 == 0 else -1}.")
    lines.append("")
    lines += labels
    return "\n".join(lines) + "\n"


def frucht_lp() -> DualFormLP:
    """Maximum fractional independent set of the Frucht graph, as
    ``min -1.x`` s.t. ``x_u + x_v <= 1`` per edge.  Every coefficient, cost and
    bound is identical, so color passing sees a 3-regular graph with a single
    color although the Frucht graph has no nontrivial automorphism."""
    g = nx.frucht_graph()
    nodes = sorted(g.nodes)
    one = Fraction(1)
    rows = [{u: one, v: one} for u, v in sorted(tuple(sorted(e)) for e in g.edges)]
    names = [f"x({u})" for u in nodes]
    prov = [f"edge {u}-{v}" for u, v in sorted(tuple(sorted(e)) for e in g.edges)]
    return DualFormLP(rows, [one] * len(rows), [-one] * len(nodes), names, prov, 1, Fraction(0))


def planted_lp(rng: np.random.Generator, n_min: int = 20, n_max: int = 200,
               block_min: int = 2, block_max: int = 10, density: float = 0.3) -> DualFormLP:
    """Random sparse bounded LP whose columns come in blocks of interchangeable copies.

    Column block ``j`` holds ``s_j`` copies with a shared cost.  Rows are of
    three kinds, each invariant under permuting the copies of a block:

    * aggregate rows ``sum_j a_j * (sum over copies of block j) <= b``;
    * per-copy rows ``sum_j a_j x_{j,t} <= b`` for ``t = 1..s``, over blocks
      of one common size ``s`` (the same permutation applied to every block);
    * box rows ``+-x <= U_j`` for every copy.

    ``b >= 0`` keeps ``x = 0`` feasible and the box rows keep the LP bounded.
    Entries are small integers so rational mode stays exact.
    """
    target = int(rng.integers(n_min, n_max + 1))
    sizes: list[int] = []
    while sum(sizes) < target:
        sizes.append(int(rng.integers(block_min, block_max + 1)))
    while sum(sizes) > n_max:
        sizes[-1] -= 1
        if sizes[-1] < block_min:
            sizes.pop()
    k = len(sizes)
    start = np.concatenate(([0], np.cumsum(sizes))).astype(int)
    n = int(start[-1])
    cost = rng.integers(-3, 4, size=k)
    c = [Fraction(int(cost[j])) for j in range(k) for _ in range(sizes[j])]
    by_size: dict[int, list[int]] = {}
    for j, s in enumerate(sizes):
        by_size.setdefault(s, []).append(j)

    def coefs(blocks):
        support = [j for j in blocks if rng.random() < density] or [int(rng.choice(blocks))]
        return {j: int(rng.choice([-2, -1, 1, 2, 3])) for j in support}

    rows: list[dict] = []
    b: list[Fraction] = []
    prov: list[str] = []
    for r in range(int(rng.integers(k // 2 + 1, k + 2))):
        rhs = Fraction(int(rng.integers(0, 6)))
        if rng.random() < 0.4:
            a = coefs(list(range(k)))
            row = {int(start[j] + t): Fraction(a[j]) for j in a for t in range(sizes[j])}
            rows.append(row)
            b.append(rhs * 3)
            prov.append(f"aggregate {r}")
        else:
            s = int(rng.choice(sorted(by_size)))
            a = coefs(by_size[s])
            for t in range(s):
                rows.append({int(start[j] + t): Fraction(a[j]) for j in a})
                b.append(rhs)
                prov.append(f"copy row {r}.{t}")
    ub = rng.integers(1, 5, size=k)
    for j in range(k):
        for t in range(sizes[j]):
            col = int(start[j] + t)
            rows.append({col: Fraction(1)})
            b.append(Fraction(int(ub[j])))
            prov.append(f"upper {col}")
            rows.append({col: Fraction(-1)})
            b.append(Fraction(int(ub[j])))
            prov.append(f"lower {col}")
    return DualFormLP(rows, b, c, [f"x{j}" for j in range(n)], prov, 1, Fraction(0))


def asymmetric_lp(n: int = 6) -> DualFormLP:
    """Triangular LP with pairwise distinct costs and bounds: every color class is a singleton."""
    rows, b = [], []
    for i in range(n):
        rows.append({j: Fraction(j + 1) for j in range(i + 1)})
        b.append(Fraction(10 * (i + 1)))
        rows.append({i: Fraction(-1)})
        b.append(Fraction(i))
    c = [Fraction(-(j + 1) * 7) for j in range(n)]
    return DualFormLP(rows, b, c, [f"x{j}" for j in range(n)], None, 1, Fraction(0))


__all__ = ["asymmetric_lp", "cora_mini_lkb", "frucht_lp", "gridworld_lkb", "planted_lp", "smokers_grid_lkb"]
