import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SMALL_PAIRS, dual_of
from oracles import matmul, random_partition
from rlplift.corpus.generators import asymmetric_lp, frucht_lp, planted_lp
from rlplift.lifting import (LiftingError, Partition, build_coefficient_graph,
                             char_matrix, check_fa_identities, color_passing,
                             fractional_automorphism, lift, lift_lp, lifted_solve, unlift,
                             verify_equitable)
from rlplift.lp import DualFormLP, OPTIMAL, check_feasible, solve

F = Fraction
R2 = math.sqrt(2)


def named(lp, classes):
    return sorted(sorted(lp.col_names[j] for j in c) for c in classes)


# -- coefficient graph -----------------------------------------------------------

def test_toy_graph(toy_dual):
    g = build_coefficient_graph(toy_dual)
    assert (g.n, g.m) == (3, 4)
    by_name = dict(zip(toy_dual.col_names, g.colors[:3].tolist()))
    assert by_name["p(x)"] == by_name["p(y)"] != by_name["p(z)"]
    rows = g.colors[3:].tolist()
    assert rows[1] == rows[2] and len({rows[0], rows[1], rows[3]}) == 3
    assert not set(g.colors[:3].tolist()) & set(rows)
    assert sorted(g.edge_values) == [-1, 1]
    assert len(g.edges) == toy_dual.nnz == 8


def test_diagonal_graph():
    n = 5
    lp = DualFormLP([{j: F(1)} for j in range(n)], [F(2)] * n, [F(1)] * n)
    g = build_coefficient_graph(lp)
    assert len(g.edges) == n and len(g.edge_values) == 1
    assert all(len(g.neighbors(v)) == 1 for v in range(2 * n))
    assert len(set(g.colors.tolist())) == 2


def test_frucht_graph():
    g = build_coefficient_graph(frucht_lp())
    assert (g.n, g.m) == (12, 18)
    assert len(set(g.colors[:12].tolist())) == 1 and len(set(g.colors[12:].tolist())) == 1
    assert len(g.edge_values) == 1


def test_graph_edges_iff_nonzero():
    lp = DualFormLP([{0: F(0), 1: F(2)}], [F(0)], [F(0), F(0)])
    assert build_coefficient_graph(lp).edges == [(0, 1, 0)]


def test_color_eps_buckets():
    lp = DualFormLP([{0: 1.0, 1: 1.0 + 1e-12}], [1.0], [1.0, 1.0])
    assert color_passing(build_coefficient_graph(lp)).p == 2
    assert color_passing(build_coefficient_graph(lp, color_eps=1e-6)).p == 1


# -- color passing ---------------------------------------------------------------

def test_toy_partition(toy_dual):
    part = color_passing(build_coefficient_graph(toy_dual))
    assert named(toy_dual, part.col_classes) == [["p(x)", "p(y)"], ["p(z)"]]
    assert sorted(tuple(c) for c in part.row_classes) == [(0,), (1, 2), (3,)]
    assert verify_equitable(build_coefficient_graph(toy_dual), part).ok


def test_frucht_single_class():
    part = color_passing(build_coefficient_graph(frucht_lp()))
    assert (part.p, part.q) == (1, 1)
    assert part.rounds == 0


def test_distinct_colors_are_discrete():
    lp = asymmetric_lp(6)
    part = color_passing(build_coefficient_graph(lp))
    assert part.p == lp.n and part.q == lp.m and part.rounds == 0


def test_canonical_numbering(flow_dual):
    part = color_passing(build_coefficient_graph(flow_dual))
    firsts = [c[0] for c in part.col_classes]
    assert firsts == sorted(firsts)
    assert all(c == sorted(c) for c in part.col_classes + part.row_classes)


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS)
def test_fixture_partitions_are_equitable(rlp, lkb):
    lp = dual_of(rlp, lkb)
    g = build_coefficient_graph(lp)
    part = color_passing(g)
    assert verify_equitable(g, part).ok
    assert all(check_fa_identities(lp, part).values())
    assert part.rounds <= g.num_vertices
    # classes refine the initial colors
    for cls in part.col_classes:
        assert len({lp.c[j] for j in cls}) == 1
    for cls in part.row_classes:
        assert len({lp.b[i] for i in cls}) == 1


# -- verify_equitable ----------------------------------------------------------

def test_merging_x_and_z_is_not_equitable(toy_dual):
    g = build_coefficient_graph(toy_dual)
    pos = {n: j for j, n in enumerate(toy_dual.col_names)}
    part = Partition([[pos["p(x)"], pos["p(z)"]], [pos["p(y)"]]], [[0], [1, 2], [3]])
    res = verify_equitable(g, part)
    assert not res.ok
    a, b, target, _ = res.witness
    assert {a, b} == {("col", pos["p(x)"]), ("col", pos["p(z)"])}
    assert target == ("row", 1)  # the class {r2, r3}


def test_discrete_is_equitable(flow_dual):
    g = build_coefficient_graph(flow_dual)
    assert verify_equitable(g, Partition.discrete(flow_dual.n, flow_dual.m)).ok


def test_verify_rejects_bad_cover(toy_dual):
    g = build_coefficient_graph(toy_dual)
    with pytest.raises(ValueError):
        verify_equitable(g, Partition([[0, 1]], [[0], [1, 2], [3]]))


# -- fractional automorphisms and the characteristic matrix -----------------------

def test_toy_fractional_automorphism():
    part = Partition([[0, 1], [2]], [[0], [1, 2], [3]])
    XP, XQ = fractional_automorphism(part)
    h = F(1, 2)
    assert XP == [[h, h, 0], [h, h, 0], [0, 0, 1]]
    assert XQ[1][2] == h and XQ[0][0] == 1


def test_discrete_fa_is_identity():
    XP, XQ = fractional_automorphism(Partition.discrete(3, 2))
    assert XP == [[int(i == j) for j in range(3)] for i in range(3)]
    assert XQ == [[1, 0], [0, 1]]


def test_frucht_fa_is_uniform():
    lp = frucht_lp()
    XP, _ = fractional_automorphism(color_passing(build_coefficient_graph(lp)))
    assert XP == [[F(1, 12)] * 12 for _ in range(12)]


def test_fa_identities_by_dense_products(toy_dual):
    part = color_passing(build_coefficient_graph(toy_dual))
    XP, XQ = fractional_automorphism(part)
    A = toy_dual.dense()
    assert matmul(XQ, A) == matmul(A, XP)
    assert matmul([toy_dual.c], XP) == [toy_dual.c]
    assert matmul(XQ, [[v] for v in toy_dual.b]) == [[v] for v in toy_dual.b]


def test_fa_identities_fail_off_equitable(toy_dual):
    pos = {n: j for j, n in enumerate(toy_dual.col_names)}
    part = Partition([[pos["p(x)"], pos["p(z)"]], [pos["p(y)"]]], [[0], [1, 2], [3]])
    res = check_fa_identities(toy_dual, part)
    assert not res["XQ_A_eq_A_XP"] and not res["cT_XP_eq_cT"] and res["XQ_b_eq_b"]


def test_char_matrix_example():
    B = char_matrix(Partition([[0, 1], [2]], []))
    assert B.shape == (3, 2)
    assert np.allclose(B.dense(), [[1 / R2, 0], [1 / R2, 0], [0, 1]])
    assert B.incidence() == [[1, 0], [1, 0], [0, 1]]
    assert B.squared() == [[F(1, 2), 0], [F(1, 2), 0], [0, 1]]


def test_singleton_char_matrix_is_identity():
    assert np.array_equal(char_matrix(Partition.discrete(4, 0)).dense(), np.eye(4))


def test_char_matrix_against_eq_on_random_partitions():
    rng = np.random.default_rng(0)
    for _ in range(50):
        size = int(rng.integers(1, 12))
        part = Partition(random_partition(rng, size), [])
        B = char_matrix(part)
        XP, _ = fractional_automorphism(part)
        # B B^T entry (i, j) is a product of two 1/sqrt|P| entries: use the exact squares
        BBt = [[sum((B.squared()[i][k] if B.class_of[i] == B.class_of[j] == k else 0
                     for k in range(B.shape[1])), F(0)) for j in range(size)] for i in range(size)]
        assert BBt == XP == B.projector()
        assert np.allclose(B.dense() @ B.dense().T, np.array(XP, dtype=float))
        assert B.gram() == [[int(i == j) for j in range(B.shape[1])] for i in range(B.shape[1])]
        assert np.allclose(B.dense().T @ B.dense(), np.eye(B.shape[1]))


# -- lift and unlift -------------------------------------------------------------

def _toy_parts(toy_dual):
    part = color_passing(build_coefficient_graph(toy_dual))
    xy = next(k for k, c in enumerate(part.col_classes) if len(c) == 2)
    return part, xy, 1 - xy


def test_toy_lift_normalized(toy_dual):
    part, xy, z = _toy_parts(toy_dual)
    lifted = lift(toy_dual, part, dedup=False, exact=False)
    AB = [[r.get(xy, 0.0), r.get(z, 0.0)] for r in lifted.lp.rows]
    assert np.allclose(AB, [[R2, 1], [-1 / R2, 0], [-1 / R2, 0], [R2, -1]])
    assert np.allclose([lifted.lp.c[xy], lifted.lp.c[z]], [0, 1])
    assert lifted.p == 2 and lifted.normalized
    assert lift(toy_dual, part, dedup=True, exact=False).lp.m == 3


def test_toy_lift_exact(toy_dual):
    part, xy, z = _toy_parts(toy_dual)
    lifted = lift(toy_dual, part)
    assert not lifted.normalized
    rows = sorted((r.get(xy, 0), r.get(z, 0), bi) for r, bi in zip(lifted.lp.rows, lifted.lp.b))
    # the 0/1 incidence matrix: class sums of each row
    assert rows == [(-1, 0, 0), (2, -1, -1), (2, 1, 1)]
    assert lifted.lp.exact


def test_toy_unlift(toy_dual):
    part, xy, z = _toy_parts(toy_dual)
    lifted = lift(toy_dual, part, exact=False)
    y = [0.0, 0.0]
    y[z] = 1.0
    x = dict(zip(toy_dual.col_names, unlift(lifted, y)))
    assert x == {"p(x)": 0.0, "p(y)": 0.0, "p(z)": 1.0}
    assert unlift(lifted, [0.0, 0.0]) == [0.0] * 3
    with pytest.raises(ValueError):
        unlift(lifted, [1.0])


def test_normalized_unlift_scales():
    lifted = lift(DualFormLP([{0: F(1), 1: F(1)}], [F(1)], [F(1), F(1)]),
                  Partition([[0, 1]], [[0]]), exact=False)
    assert unlift(lifted, [R2]) == pytest.approx([1.0, 1.0])


def test_discrete_lift_is_identity(flow_dual):
    lifted = lift(flow_dual, Partition.discrete(flow_dual.n, flow_dual.m))
    assert lifted.lp.rows == flow_dual.rows and lifted.lp.b == flow_dual.b
    assert lifted.lp.c == flow_dual.c and lifted.lp.col_names == flow_dual.col_names
    assert unlift(lifted, list(range(flow_dual.n))) == list(range(flow_dual.n))


def test_frucht_lifts_to_one_column():
    lp = frucht_lp()
    lifted = lift_lp(lp)
    assert lifted.p == 1 and lifted.lp.m == 1
    sol, rep = lifted_solve(lp)
    assert sol.objective == -6 and rep.lifted.vars == 1 and rep.verified


def test_dedup_rejects_non_equitable(toy_dual):
    pos = {n: j for j, n in enumerate(toy_dual.col_names)}
    part = Partition([[pos["p(x)"], pos["p(z)"]], [pos["p(y)"]]], [[0], [1, 2], [3]])
    with pytest.raises(LiftingError):
        lift(toy_dual, part)


# -- lifted_solve ------------------------------------------------------------------

@pytest.mark.parametrize("mode", ["rational", "float", "highs"])
def test_toy_lifted_solve(toy_dual, mode):
    sol, rep = lifted_solve(toy_dual, mode)
    assert sol.status == OPTIMAL and rep.verified
    assert rep.lifted.vars == 2 and rep.ground.vars == 3
    assert sol.objective == pytest.approx(1, abs=1e-9)
    x = dict(zip(toy_dual.col_names, sol.x))
    assert [x["p(x)"], x["p(y)"], x["p(z)"]] == pytest.approx([0, 0, 1], abs=1e-9)
    if mode == "rational":
        assert sol.objective == 1


@pytest.mark.parametrize("mode", ["rational", "float"])
def test_flow_lifted_solve(flow_dual, mode):
    sol, rep = lifted_solve(flow_dual, mode)
    ground = solve(flow_dual, mode)
    assert flow_dual.original_objective(sol.objective) == pytest.approx(5, abs=1e-9)
    assert sol.objective == pytest.approx(ground.objective, abs=1e-6)
    if mode == "rational":
        assert sol.objective == ground.objective == -5


def test_asymmetric_lifted_solve():
    lp = asymmetric_lp(6)
    sol, rep = lifted_solve(lp)
    assert rep.lifted.vars == lp.n
    assert sol.objective == solve(lp).objective


def test_degenerate_inputs_short_circuit():
    sol, rep = lifted_solve(DualFormLP())
    assert sol.status == OPTIMAL and rep.rounds == 0
    sol, rep = lifted_solve(DualFormLP([], [], [F(0), F(0)], ["a", "b"]))
    assert sol.x == [0, 0]


def test_lifted_solve_reports_infeasible():
    lp = DualFormLP([{0: F(1), 1: F(1)}, {0: F(-1), 1: F(-1)}], [F(-1), F(-1)], [F(1), F(1)])
    sol, rep = lifted_solve(lp)
    assert sol.status == "infeasible" and not rep.verified


def test_report_json(toy_dual):
    _, rep = lifted_solve(toy_dual)
    doc = rep.to_json(timings=False)
    assert doc == {"ground": {"vars": 3, "rows": 4, "nnz": 8},
                   "lifted": {"vars": 2, "rows": 3, "nnz": 5},
                   "rounds": doc["rounds"], "verified": True,
                   "times_ms": dict.fromkeys(["graph", "colorpass", "lift", "solve", "unlift"])}
    assert set(rep.to_json()["times_ms"]) == {"graph", "colorpass", "lift", "solve", "unlift"}


def test_no_dedup_keeps_rows(flow_dual):
    _, rep = lifted_solve(flow_dual, dedup=False)
    assert rep.lifted.rows == flow_dual.m


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS)
def test_fixture_soundness(rlp, lkb):
    lp = dual_of(rlp, lkb)
    ground = solve(lp, "highs")
    sol, rep = lifted_solve(lp, "highs")
    assert rep.verified and rep.lifted.vars <= rep.ground.vars
    assert sol.objective == pytest.approx(ground.objective, rel=1e-6, abs=1e-9)
    assert check_feasible(lp, sol.x, 1e-9 * (1 + max(abs(float(v)) for v in lp.b))).ok


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS)
def test_projected_rows_are_constant(rlp, lkb):
    lp = dual_of(rlp, lkb)
    part = color_passing(build_coefficient_graph(lp))
    cls = part.col_class_of()
    for members in part.row_classes:
        proj = []
        for i in members:
            out: dict = {}
            for j, v in lp.rows[i].items():
                out[cls[j]] = out.get(cls[j], 0) + v
            proj.append(({k: v for k, v in out.items() if v}, lp.b[i]))
        assert all(p == proj[0] for p in proj)


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS[:5])
def test_projection_keeps_feasibility(rlp, lkb):
    # X_P x is feasible with the same objective for feasible x
    lp = dual_of(rlp, lkb)
    part = color_passing(build_coefficient_graph(lp))
    cls = part.col_class_of()
    sizes = [len(c) for c in part.col_classes]
    x0 = solve(lp, "rational").x
    rng = np.random.default_rng(0)
    A = lp.matrix().toarray()
    slack = np.array([float(v) for v in lp.b]) - A @ np.array([float(v) for v in x0])
    for _ in range(20):
        d = rng.integers(-2, 3, size=lp.n)
        ad = A @ d
        steps = [s / a for s, a in zip(slack, ad) if a > 0]
        t = F(min(steps + [1.0])).limit_denominator(1000) / 2
        x = [xi + t * int(di) for xi, di in zip(x0, d)]
        if not check_feasible(lp, x, 0).ok:
            continue
        means = [F(0)] * part.p
        for j, v in enumerate(x):
            means[cls[j]] += v
        px = [means[cls[j]] / sizes[cls[j]] for j in range(lp.n)]
        assert check_feasible(lp, px, 0).ok
        assert lp.objective(px) == lp.objective(x)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_planted_lps_property(seed):
    lp = planted_lp(np.random.default_rng(seed), n_min=6, n_max=30)
    g = build_coefficient_graph(lp)
    part = color_passing(g)
    assert verify_equitable(g, part).ok
    assert all(check_fa_identities(lp, part).values())
    sol, rep = lifted_solve(lp, "rational")
    assert rep.verified and sol.objective == solve(lp).objective
