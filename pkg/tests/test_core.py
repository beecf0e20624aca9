import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaindisc.core import (
    Coloring,
    IndexSet,
    Metric,
    PointSet,
    dumps_coloring,
    dumps_points,
    loads_coloring,
    loads_points,
    parse_metric,
    project,
    rearrange_nonincreasing,
    signed_sum,
    weak_l2_membership,
    weak_l2_radius,
)

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


def test_pointset_rejects_bad_input():
    with pytest.raises(ValueError):
        PointSet(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        PointSet(np.array([[np.inf]]))
    with pytest.raises(ValueError):
        PointSet.from_rows([[1, 2], [3]])
    with pytest.raises(ValueError):
        PointSet.from_rows([])


def test_pointset_is_immutable_and_dedups_in_order():
    T = PointSet.from_rows([[2, 0], [1, 1], [2, 0], [0, 0]])
    with pytest.raises(ValueError):
        T.points[0, 0] = 5
    assert T.dedup().points.tolist() == [[2, 0], [1, 1], [0, 0]]
    assert len(T) == 4 and T.n == 2


def test_with_origin_prepends_zero_once():
    T = PointSet.from_rows([[1, 0], [0, 0], [0, 1]])
    assert T.with_origin().points.tolist() == [[0, 0], [1, 0], [0, 1]]


def test_coloring_entries_checked():
    with pytest.raises(ValueError):
        Coloring(np.array([1, 2]))
    c = Coloring(np.array([1, 0, -1, 0]))
    assert c.zero_count == 2 and not c.is_full
    assert Coloring(np.array([1, -1])).is_full


def test_project_examples():
    T = PointSet.from_rows([[1, 2], [3, 4]])
    assert project(T, IndexSet((1,))).points.tolist() == [[2], [4]]
    assert project(T, IndexSet.full(2)) == T
    r = 1 / math.sqrt(3)
    U = PointSet.from_rows([[r, r, r], [0, 0, 0]])
    assert project(U, IndexSet.from_one_based([1, 2])).points.tolist() == [[r, r], [0, 0]]
    with pytest.raises(IndexError):
        project(T, IndexSet((2,)))


def test_index_set_conventions():
    assert IndexSet.from_one_based([3, 1]).members == (0, 2)
    with pytest.raises(ValueError):
        IndexSet(())
    assert len(IndexSet((), allow_empty=True)) == 0


def test_signed_sum_examples():
    assert signed_sum([1, 2, 3], Coloring(np.array([1, -1, 0]))) == -1
    assert signed_sum([5.5, -2], np.zeros(2)) == 0
    r = 1 / math.sqrt(3)
    assert signed_sum([r, r, r], np.ones(3)) == pytest.approx(math.sqrt(3), abs=1e-15)
    with pytest.raises(ValueError):
        signed_sum([1, 2], np.ones(3))


def test_rearrange_examples():
    assert rearrange_nonincreasing([-3, 1, 2]).tolist() == [3, 2, 1]
    assert rearrange_nonincreasing([0, 0]).tolist() == [0, 0]
    a, b = 1 / math.sqrt(2), 1 / math.sqrt(3)
    assert rearrange_nonincreasing([a, 1, b]).tolist() == [1, a, b]


def test_weak_l2_examples():
    assert weak_l2_membership([1, 1 / math.sqrt(2), 1 / math.sqrt(3)], 1)
    assert not weak_l2_membership([2, 0, 0], 1)
    assert weak_l2_membership([0, 0, 0], 0)
    assert weak_l2_radius([0.5, -2, 1]) == pytest.approx(2.0)


def test_metric_kinds():
    x, y = np.array([3.0, 4.0, 0.0, 0.0]), np.zeros(4)
    assert Metric().distance(x, y) == 5.0
    assert Metric("empirical").distance(x, y) == pytest.approx(2.5)
    restricted = Metric("empirical", IndexSet((0,)))
    assert restricted.distance(x, y) == pytest.approx(3.0)
    assert parse_metric("L2", [1, 2]).distance(x, y) == pytest.approx(5 / math.sqrt(2))
    with pytest.raises(ValueError):
        parse_metric("linf")


def test_csv_json_round_trip():
    T = PointSet.from_rows([[0.1, -2.5], [1e-17, 3.0]])
    assert loads_points(dumps_points(T)) == T
    assert loads_points(dumps_points(T, "json"), "json") == T
    assert loads_points("x,y\n1,2\n3,4\n") == PointSet.from_rows([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        loads_points("1,2\n3,oops\n")
    c = Coloring(np.array([1, 0, -1]))
    assert loads_coloring(dumps_coloring(c)) == c


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(finite, min_size=4, max_size=4), min_size=1, max_size=5), st.data())
def test_projection_composes(rows, data):
    T = PointSet.from_rows(rows)
    I = sorted(data.draw(st.sets(st.integers(0, 3), min_size=1)))
    J = sorted(data.draw(st.sets(st.integers(0, len(I) - 1), min_size=1)))
    two_step = project(project(T, IndexSet(I)), IndexSet(J))
    assert two_step == project(T, IndexSet([I[j] for j in J]))


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=3, max_size=3), st.lists(finite, min_size=3, max_size=3),
       st.lists(st.sampled_from([-1, 0, 1]), min_size=3, max_size=3), finite, finite)
def test_signed_sum_linear(t, u, eta, a, b):
    e = np.array(eta)
    lhs = signed_sum(a * np.array(t) + b * np.array(u), e)
    rhs = a * signed_sum(t, e) + b * signed_sum(u, e)
    scale = max(1.0, abs(a) * np.abs(t).sum() + abs(b) * np.abs(u).sum())
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=1, max_size=8), st.floats(0, 50), st.floats(0, 50))
def test_weak_l2_monotone_in_r(x, r, extra):
    if weak_l2_membership(x, r):
        assert weak_l2_membership(x, r + extra)


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=0, max_size=10))
def test_rearrangement_is_sorted_permutation(x):
    out = rearrange_nonincreasing(x)
    assert sorted(out.tolist()) == sorted(abs(v) for v in x)
    assert np.all(np.diff(out) <= 0)
