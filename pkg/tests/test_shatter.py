import itertools
from fractions import Fraction

import numpy as np
import pytest

from chaindisc.coloring import hdisc_exact
from chaindisc.core import IndexSet, PointSet, PreconditionError, SizeError
from chaindisc.generators import intervals
from chaindisc.shatter import (
    classical_vc,
    haussler_check,
    hdisc_vc_lower,
    is_shattered,
    sign_embedding_scatter,
    vc_dim,
)

PM_CUBE = PointSet(np.array(list(itertools.product((-1.0, 1.0), repeat=3))))


def bool_cube(n):
    return PointSet(np.array(list(itertools.product((0.0, 1.0), repeat=n))))


TWO_E1 = PointSet.from_rows([[0.0, 0.0], [2.0, 0.0]])


def brute_shattered(A, cols, eps):
    """Try every level vector from the per-coordinate candidate grids; check each pattern has a row."""
    A = np.asarray(A)
    eps = Fraction(eps)
    grids = []
    for c in cols:
        vals = sorted({Fraction(float(v)) for v in A[:, c]})
        cands = {v + eps for v in vals} | {v - eps for v in vals}
        cands |= {(a + b) / 2 for a, b in zip(vals, vals[1:])}
        grids.append(sorted(cands))
    F = [[Fraction(float(v)) for v in row] for row in A]
    for s in itertools.product(*grids):
        ok = True
        for pattern in itertools.product((True, False), repeat=len(cols)):
            if not any(
                all((r[c] >= si + eps) if up else (r[c] <= si - eps)
                    for c, si, up in zip(cols, s, pattern))
                for r in F
            ):
                ok = False
                break
        if ok:
            return True
    return False


def brute_vc(A, eps):
    n = A.shape[1]
    best = 0
    for k in range(1, n + 1):
        if any(brute_shattered(A, c, eps) for c in itertools.combinations(range(n), k)):
            best = k
    return best


def test_cube_shatters_itself():
    w = is_shattered(PM_CUBE, IndexSet.full(3), 1.0)
    assert w is not None and w.validate(PM_CUBE)
    assert all(s == 0 for s in w.levels)
    assert vc_dim(PM_CUBE, 1.0) == 3
    assert vc_dim(PM_CUBE, 1.0, hull=True) == 3


def test_two_point_examples():
    w = is_shattered(TWO_E1, IndexSet((0,)), 1.0)
    assert w is not None and w.levels == (Fraction(1),) and w.validate(TWO_E1)
    assert is_shattered(TWO_E1, IndexSet((0, 1)), 1.0) is None
    assert vc_dim(TWO_E1, 1.0) == 1


def test_large_eps_gives_zero():
    rng = np.random.default_rng(40)
    for _ in range(5):
        A = rng.uniform(-1, 1, size=(5, 3))
        spread = (A.max(axis=0) - A.min(axis=0)).max()
        assert vc_dim(PointSet(A), spread / 2 + 1e-6) == 0


def test_size_cap():
    with pytest.raises(SizeError):
        is_shattered(PointSet(np.zeros((1, 17))), IndexSet.full(17), 1.0)
    with pytest.raises(ValueError):
        vc_dim(PM_CUBE, 0)


def test_finite_mode_matches_brute_force():
    rng = np.random.default_rng(41)
    for _ in range(12):
        A = rng.integers(-3, 4, size=(int(rng.integers(2, 9)), 3)) / 2
        for eps in (0.25, 0.5, 1.0):
            assert vc_dim(PointSet(A), eps) == brute_vc(A, eps)


def test_witnesses_replay_and_monotone_in_eps():
    rng = np.random.default_rng(42)
    for _ in range(6):
        T = PointSet(rng.uniform(-1, 1, size=(5, 3)))
        prev_f = prev_h = 99
        for eps in (0.05, 0.1, 0.2, 0.4, 0.8):
            f, wf = vc_dim(T, eps, return_witness=True)
            h, wh = vc_dim(T, eps, hull=True, return_witness=True)
            assert h >= f
            assert f <= prev_f and h <= prev_h
            prev_f, prev_h = f, h
            for w in (wf, wh):
                if w is not None:
                    assert w.validate(T)


def test_hull_witness_json_shape():
    _, w = vc_dim(PM_CUBE, 1.0, hull=True, return_witness=True)
    d = w.as_dict()
    assert d["indices"] == [1, 2, 3] and len(d["assignment"]) == 8
    assert all(abs(sum(v) - 1) < 1e-12 for v in d["assignment"].values())


def test_vc_at_half_equals_classical_on_boolean_classes():
    rng = np.random.default_rng(43)
    for _ in range(15):
        A = rng.integers(0, 2, size=(int(rng.integers(1, 12)), 4)).astype(float)
        T = PointSet(A)
        assert vc_dim(T, 0.5) == classical_vc(T)
    assert classical_vc(bool_cube(4)) == 4
    with pytest.raises(PreconditionError):
        classical_vc(PointSet.from_rows([[0.5]]))


def test_intervals_have_vc_one():
    for seed in range(3):
        assert classical_vc(intervals(10, 10, seed=seed)) == 1


def test_hdisc_vc_lower_examples():
    sq = PointSet(np.array(list(itertools.product((-1.0, 1.0), repeat=2))))
    assert hdisc_vc_lower(sq, [0.5, 1.0]) == 2 == hdisc_exact(sq)
    assert hdisc_vc_lower(PointSet(np.zeros((1, 3)))) == 0
    with pytest.raises(SizeError):
        hdisc_vc_lower(PointSet(np.zeros((7, 2))))


def test_hdisc_dominates_vc_lower_bound():
    rng = np.random.default_rng(44)
    for i in range(12):
        n = int(rng.integers(1, 5))
        A = rng.uniform(-1, 1, size=(int(rng.integers(1, 5)), n))
        if i % 2:
            A = np.round(A * 4) / 4
        T = PointSet(A)
        assert hdisc_exact(T) >= hdisc_vc_lower(T)


def test_haussler_examples():
    rep = haussler_check(PointSet(np.zeros((1, 6))), d=1)
    assert all(r["D"] == 1 for r in rep["rows"]) and rep["implied_constant"] <= 1
    rep = haussler_check(intervals(12, 12, seed=0), d=1)
    assert np.isfinite(rep["implied_constant"]) and not rep["violation"]
    rep = haussler_check(bool_cube(3), d=1)
    assert rep["violation"] and rep["measured_vc"] == 3


def test_haussler_thread_independent():
    T = intervals(12, 12, seed=5)
    assert haussler_check(T, 1, threads=1) == haussler_check(T, 1, threads=3)


def test_sign_embedding_scatter_is_descriptive():
    out = sign_embedding_scatter(PM_CUBE, [0.5, 1.0])
    assert out["k"] == 3 and [r["vc"] for r in out["rows"]] == [3, 3]
    assert out["mean_sup_over_k"] == pytest.approx(1.0)
