import itertools
import math

import numpy as np
import pytest

from chaindisc import chaining as ch
from chaindisc.coloring import (
    PartialColoringFailure,
    disc_exact,
    disc_heuristic,
    entropy_budget_check,
    hdisc_exact,
    matousek_color,
    partial_color,
    spencer_color,
    verify_partial,
)
from chaindisc.core import PointSet, PreconditionError, SizeError
from chaindisc.generators import intervals, random_box, random_signs

R3 = 1 / math.sqrt(3)


def brute_disc(A):
    A = np.asarray(A, dtype=float)
    return min(
        np.abs(A @ np.array(e)).max() for e in itertools.product((-1.0, 1.0), repeat=A.shape[1])
    )


def brute_hdisc(A):
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    return max(
        brute_disc(A[:, list(I)])
        for k in range(1, n + 1)
        for I in itertools.combinations(range(n), k)
    )


def test_disc_examples():
    assert disc_exact(PointSet.from_rows([[0, 0], [1, 0]])).value == 1
    assert disc_exact(PointSet.from_rows([[0, 0, 0], [R3, R3, R3]])).value == pytest.approx(R3)
    r = 1 / math.sqrt(2)
    assert disc_exact(PointSet.from_rows([[0, 0], [r, r]])).value == pytest.approx(0, abs=1e-15)
    with pytest.raises(SizeError):
        disc_exact(PointSet(np.zeros((1, 25))))


def test_disc_exact_matches_brute_force_and_witness():
    rng = np.random.default_rng(30)
    for _ in range(10):
        A = rng.uniform(-1, 1, size=(int(rng.integers(1, 6)), int(rng.integers(1, 9))))
        res = disc_exact(PointSet(A))
        assert res.exact and res.coloring.is_full
        assert res.value == pytest.approx(brute_disc(A), abs=1e-12)
        assert res.value == pytest.approx(np.abs(A @ res.coloring.entries).max(), abs=1e-12)


def test_hdisc_examples_and_oracle():
    assert hdisc_exact(PointSet.from_rows([[0, 0, 0], [R3, R3, R3]])) == pytest.approx(R3)
    assert hdisc_exact(PointSet.from_rows([[0, 0], [1, 0]])) == 1
    rng = np.random.default_rng(31)
    for _ in range(5):
        A = rng.uniform(-1, 1, size=(3, 5))
        h = hdisc_exact(PointSet(A))
        assert h == pytest.approx(brute_hdisc(A), abs=1e-12)
        assert h >= disc_exact(PointSet(A)).value - 1e-12
    with pytest.raises(SizeError):
        hdisc_exact(PointSet(np.zeros((1, 17))))


def test_disc_invariant_under_symmetric_hull_grid():
    rng = np.random.default_rng(32)
    for _ in range(6):
        A = rng.uniform(-1, 1, size=(3, 6))
        mids = [(A[i] + A[j]) / 2 for i, j in itertools.combinations(range(3), 2)]
        mids += [(A[i] - A[j]) / 2 for i, j in itertools.combinations(range(3), 2)]
        big = np.vstack([A, -A, mids])
        assert disc_exact(PointSet(big)).value == pytest.approx(disc_exact(PointSet(A)).value, abs=1e-12)


def test_disc_heuristic_matches_exact_on_small_instances():
    rng = np.random.default_rng(33)
    hits = 0
    for i in range(100):
        T = PointSet(rng.uniform(-1, 1, size=(int(rng.integers(2, 8)), int(rng.integers(2, 13)))))
        h = disc_heuristic(T, budget=4096, seed=i)
        hits += abs(h.value - disc_exact(T).value) <= 1e-9
        assert not h.exact
    assert hits >= 99


def test_disc_heuristic_trivial_and_deterministic():
    assert disc_heuristic(PointSet(np.zeros((1, 5)))).value == 0
    T = random_box(20, 15, seed=3)
    a, b = disc_heuristic(T, budget=64, seed=9), disc_heuristic(T, budget=64, seed=9)
    assert a.value == b.value and a.coloring == b.coloring
    with pytest.raises(ValueError):
        disc_heuristic(T, budget=0)


def test_partial_color_zero_set():
    res = partial_color(PointSet(np.zeros((1, 8))))
    assert res.chain_bound == 0
    assert 2 <= res.zero_count <= 6


def test_partial_color_basis_certificates():
    n = 16
    T = PointSet(np.eye(n))
    res = partial_color(T, ch.schedule_gamma(n))
    assert verify_partial(T, res)
    assert np.all(np.abs(res.coloring.entries) <= 1)
    assert np.all(res.certificates >= np.abs(T.points @ res.coloring.entries) - 1e-9)


def test_partial_color_random_certified():
    rng = np.random.default_rng(34)
    ok = 0
    for seed in range(20):
        T = PointSet(rng.uniform(-1, 1, size=(4, 12)))
        res = partial_color(T, ch.schedule_gamma(12), budget=100_000, seed=seed, exhaustive=False)
        assert verify_partial(T, res)
        ok += res.method == "pigeonhole"
    assert ok == 20


def test_partial_color_failure_reports_stats():
    # Q tiny everywhere makes every fingerprint distinct, so no pair shares a bucket
    T = PointSet(np.eye(8))
    sched = ch.custom_schedule([4.0, 16.0], [1e-9, 1e-9])
    with pytest.raises(PartialColoringFailure) as err:
        partial_color(T, sched, budget=200, exhaustive=False)
    assert err.value.stats["sampling"]["vectors_seen"] == 200


def test_entropy_budget_examples():
    huge = ch.custom_schedule([2.0] * 5, [1e3] * 5)
    assert entropy_budget_check(huge, 1)["passes"]
    ones = ch.custom_schedule([1.0] * 10, [1.0] * 10)
    rep = entropy_budget_check(ones, 1)
    assert not rep["passes"] and rep["lhs"] == pytest.approx(10.0)
    g = entropy_budget_check(ch.schedule_gamma(256), 256)
    assert math.isfinite(g["ratio"]) and g["rhs"] == 2.56


def test_spencer_examples():
    assert spencer_color(PointSet(np.eye(16))).value == 1
    assert spencer_color(PointSet.from_rows([[0, 0], [1, 0]])).value == 1
    with pytest.warns(UserWarning):
        spencer_color(PointSet.from_rows([[2.0, 0.0]]))


def test_spencer_stitching_inequality():
    for seed in range(3):
        T = random_signs(40, 40, seed=seed)
        res = spencer_color(T, seed=seed)
        assert res.coloring.is_full
        assert res.value <= res.details["stitched_bound"] + 1e-9
        assert res.details["remainder_size"] <= 10
        for r in res.details["rounds"]:
            if not r["fallback"]:
                assert r["achieved"] <= r["bound"] + 1e-9


def test_spencer_against_exact_on_twelve():
    rng_seed = 35
    for k in range(3):
        T = random_signs(12, 12, seed=rng_seed + k)
        sp, ex = spencer_color(T, seed=k), disc_exact(T)
        assert ex.value <= sp.value
        assert sp.value <= math.sqrt(2 * 12 * math.log(2 * 12)) + 1e-9


def test_exact_disc_below_random_coloring_ceiling():
    rng = np.random.default_rng(36)
    for _ in range(100):
        T = PointSet(rng.uniform(-1, 1, size=(12, 12)))
        assert disc_exact(T).value <= math.sqrt(2 * 12 * math.log(24))


def test_matousek_examples_and_preconditions():
    assert matousek_color(PointSet(np.zeros((3, 12))), d=1).value == 0
    res = matousek_color(intervals(64, 64, seed=0), d=1)
    assert res.coloring.is_full and res.value <= 4 and res.details["measured_vc"] is None
    small = intervals(12, 12, seed=1)
    assert matousek_color(small, d=1).value >= disc_exact(small).value
    with pytest.raises(PreconditionError):
        matousek_color(PointSet.from_rows([[0.5, 1.0]]), d=1)
    cube = PointSet(np.array(list(itertools.product((0.0, 1.0), repeat=3))))
    with pytest.raises(PreconditionError):
        matousek_color(cube, d=2)


def test_colorings_deterministic():
    T = random_signs(30, 30, seed=4)
    assert spencer_color(T, seed=2).coloring == spencer_color(T, seed=2).coloring
    T = intervals(40, 40, seed=4)
    assert matousek_color(T, 1, seed=2).coloring == matousek_color(T, 1, seed=2).coloring
