import json
from collections import Counter
from fractions import Fraction

import pytest

from conftest import SMALL_PAIRS, ground_of, kb_of, model_of
from oracles import ground_rows, naive_ground
from rlplift.grounder import GroundLP, GroundingError, ground, stats
from rlplift.lang import ValidationError, parse_rlp
from rlplift.logkb import evaluate, parse_logkb

F = Fraction


def dense(lp, order):
    """Rows of ``lp`` as (coefficient list in ``order``, rel, rhs)."""
    idx = {n: j for j, n in enumerate(lp.names())}
    return [([r.coeffs.get(idx[n], F(0)) for n in order], r.rel, r.rhs) for r in lp.rows]


def test_flow_grounding():
    lp = ground_of("flow.rlp", "flow.lkb")
    assert lp.sense == "maximize"
    assert lp.n == 8
    objective = {n for n, c in zip(lp.names(), lp.c) if c}
    assert objective == {"flow(s, a)", "flow(s, b)"}
    rels = Counter(r.rel for r in lp.rows)
    assert rels == {"=": 4, ">=": 16}
    conservation = [r.provenance for r in lp.rows if r.rel == "="]
    assert conservation == ["line 9: X=a", "line 9: X=b", "line 9: X=c", "line 9: X=d"]
    # the c -> t edge carries capacity 2
    cap_ct = [r for r in lp.rows if r.provenance == "line 11: X=c, Y=t"]
    assert cap_ct[0].rhs == -2


def test_toy_matrix():
    lp = ground_of("toy.rlp", "toy.lkb")
    order = ["p(x)", "p(y)", "p(z)"]
    A = [[F(1), F(1), F(1)], [F(-1), F(0), F(0)], [F(0), F(-1), F(0)], [F(1), F(1), F(-1)]]
    assert dense(lp, order) == [(a, "<=", b) for a, b in zip(A, [F(1), F(0), F(0), F(-1)])]
    c = dict(zip(lp.names(), lp.c))
    assert [c[n] for n in order] == [0, 0, 1]
    assert lp.sense == "minimize"


def test_first_occurrence_column_order():
    assert ground_of("toy.rlp", "toy.lkb").names() == ["p(z)", "p(x)", "p(y)"]


def test_empty_index_query_adds_no_rows():
    kb = evaluate(parse_logkb("p(a). r(z) :- p(z)."))
    lp = ground(parse_rlp("var x/1; minimize: sum{p(X)} x(X); subject to {r(X)}: x(X) >= 0;"), kb)
    assert lp.m == 0 and lp.n == 1


def test_empty_objective_warns():
    kb = evaluate(parse_logkb("p(a). r(z) :- p(z)."))
    lp = ground(parse_rlp("var x/1; minimize: sum{r(X)} x(X);"), kb)
    assert lp.warnings and "empty" in lp.warnings[0]


def test_absent_parameter_names_the_atom():
    kb = evaluate(parse_logkb("p(a). p(b). c(a) = 1."))
    with pytest.raises(GroundingError, match=r"c\(b\)"):
        ground(parse_rlp("var x/1; minimize: sum{p(X)} c(X) * x(X);"), kb)


def test_invalid_model_is_refused():
    kb = evaluate(parse_logkb("p(a)."))
    with pytest.raises(ValidationError, match="nonlinear"):
        ground(parse_rlp("var x/1; minimize: sum{p(X)} x(X) * x(X);"), kb)


def test_zero_ary_variable_and_multiset_counts():
    kb = evaluate(parse_logkb("e(a, b). e(a, c). e(b, c). n(X) :- e(X, _). n(X) :- e(_, X)."))
    lp = ground(parse_rlp("var t/0; minimize: sum<n(X)> t;"), kb)
    # n(X) has one derivation per edge endpoint: 6 in total
    assert lp.names() == ["t"] and lp.c == [6]
    lp = ground(parse_rlp("var t/0; minimize: sum{n(X)} t;"), kb)
    assert lp.c == [3]


def test_stats():
    assert stats(ground_of("toy.rlp", "toy.lkb")) == (3, 4, 8)
    assert stats(GroundLP()) == (0, 0, 0)
    assert stats(ground_of("flow.rlp", "flow.lkb")) == (8, 20, 28)


def test_json_is_exact_and_stable():
    lp = ground_of("svm.rlp", "mckay.lkb")
    doc = json.loads(lp.dumps())
    assert set(doc) == {"sense", "vars", "c", "offset", "rows"}
    assert all(isinstance(v, str) for v in doc["c"])
    assert lp.dumps() == ground(model_of("svm.rlp"), kb_of("mckay.lkb")).dumps()


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS)
def test_matches_naive_grounder(rlp, lkb):
    lp = ground_of(rlp, lkb)
    obj, c0, rows = naive_ground(model_of(rlp), kb_of(lkb))
    assert Counter(ground_rows(lp)) == Counter(rows)
    assert {n: c for n, c in zip(lp.names(), lp.c) if c} == obj
    assert lp.offset == c0


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS)
def test_rows_from_one_template_are_distinct(rlp, lkb):
    lp = ground_of(rlp, lkb)
    # a chained comparison yields two rows per binding; they must still differ
    rows = [(r.provenance, r.rel, r.rhs, tuple(sorted(r.coeffs.items()))) for r in lp.rows]
    assert len(rows) == len(set(rows))
    assert max(Counter(r[0] for r in rows).values()) <= 2


@pytest.mark.parametrize("rlp,lkb", SMALL_PAIRS)
def test_columns_are_declared_atoms(rlp, lkb):
    lp = ground_of(rlp, lkb)
    declared = {p for p, _ in model_of(rlp).declared}
    assert all(n.split("(")[0] in declared for n in lp.names())
    assert all(0 <= j < lp.n for r in lp.rows for j in r.coeffs)
    assert all(v != 0 for r in lp.rows for v in r.coeffs.values())
