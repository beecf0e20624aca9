"""Covering, packing and entropy numbers, admissible sequences and gamma_2.

Conventions:

* covers use open balls centred at points of T;
* an eps-separated set has pairwise distances >= eps;
* both counting functions are piecewise constant in eps with breakpoints at
  the pairwise distances, so every integral over eps is an exact finite sum.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import PointSet, Metric, SizeError

EXACT_COUNT_LIMIT = 12
EXHAUSTIVE_SEQUENCE_LIMIT = 6


class CountResult(NamedTuple):
    value: int
    exact: bool


def _distances(T: PointSet, metric: Metric | None) -> np.ndarray:
    return (metric or Metric()).pairwise(T.dedup().points)


def _breakpoints(D: np.ndarray) -> np.ndarray:
    """0 followed by the sorted distinct positive pairwise distances."""
    iu = np.triu_indices(D.shape[0], 1)
    return np.concatenate([[0.0], np.unique(D[iu])])


# -- packing ------------------------------------------------------------------


def _greedy_separated(adj_far: np.ndarray, order: Sequence[int] | None = None) -> list[int]:
    """Greedy maximal subset whose members are pairwise ``adj_far``."""
    order = range(adj_far.shape[0]) if order is None else order
    chosen: list[int] = []
    for i in order:
        if all(adj_far[i, j] for j in chosen):
            chosen.append(i)
    return chosen


def _max_separated(adj_far: np.ndarray, lower: int) -> int:
    """Exact maximum size of a pairwise-``adj_far`` subset (branch and bound)."""
    m = adj_far.shape[0]
    nbr = [sum(1 << j for j in range(m) if j != i and adj_far[i, j]) for i in range(m)]
    best = lower

    def grow(cand: int, size: int):
        nonlocal best
        if size + bin(cand).count("1") <= best:
            return
        if cand == 0:
            best = max(best, size)
            return
        i = (cand & -cand).bit_length() - 1
        grow(cand & nbr[i], size + 1)
        grow(cand & ~(1 << i), size)

    grow((1 << m) - 1, 0)
    return best


def _packing_count(D: np.ndarray, far: np.ndarray) -> CountResult:
    greedy = len(_greedy_separated(far))
    if D.shape[0] > EXACT_COUNT_LIMIT:
        return CountResult(greedy, False)
    exact = _max_separated(far, greedy)
    assert exact >= greedy
    return CountResult(exact, True)


def packing_number(T: PointSet, eps: float, metric: Metric | None = None) -> int:
    """D(eps): size of a maximal eps-separated subset (exact maximum when |T| <= 12)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    D = _distances(T, metric)
    return _packing_count(D, D >= eps).value


# -- covering -----------------------------------------------------------------


def _greedy_cover(covers: np.ndarray) -> int:
    uncovered = np.ones(covers.shape[0], dtype=bool)
    count = 0
    while uncovered.any():
        gain = (covers & uncovered[None, :]).sum(axis=1)
        c = int(np.argmax(gain))
        uncovered &= ~covers[c]
        count += 1
    return count


def _min_cover(covers: np.ndarray, upper: int) -> int:
    m = covers.shape[0]
    masks = [sum(1 << j for j in range(m) if covers[i, j]) for i in range(m)]
    full = (1 << m) - 1
    for size in range(1, upper):
        for combo in itertools.combinations(masks, size):
            acc = 0
            for mk in combo:
                acc |= mk
            if acc == full:
                return size
    return upper


def _cover_count(covers: np.ndarray) -> CountResult:
    greedy = _greedy_cover(covers)
    if covers.shape[0] > EXACT_COUNT_LIMIT:
        return CountResult(greedy, False)
    return CountResult(_min_cover(covers, greedy), True)


def covering_number(T: PointSet, eps: float, metric: Metric | None = None) -> CountResult:
    """N(eps): fewest open eps-balls centred in T covering T."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    D = _distances(T, metric)
    return _cover_count(D < eps)


def counting_profile(T: PointSet, metric: Metric | None = None) -> dict:
    """N and D on every interval (r_j, r_{j+1}] between consecutive breakpoints.

    ``N[j]`` and ``D[j]`` hold the constant values on (r_j, r_{j+1}]; the last
    entry of ``r`` is diam(T) and beyond it N = 1.
    """
    D = _distances(T, metric)
    r = _breakpoints(D)
    N_vals, D_vals, exact = [], [], True
    for rj in r[:-1]:
        cov = _cover_count(D <= rj)
        pack = _packing_count(D, D > rj)
        N_vals.append(cov.value)
        D_vals.append(pack.value)
        exact = exact and cov.exact and pack.exact
    return {"r": r, "N": N_vals, "D": D_vals, "exact": exact}


def entropy_number(T: PointSet, k: int, metric: Metric | None = None) -> float:
    """e_k = inf{eps : N(eps) <= 2^k} over the finite set of candidate radii."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    D = _distances(T, metric)
    r = _breakpoints(D)
    cap = 2 ** k
    for rj in r:
        if _cover_count(D <= rj).value <= cap:
            return float(rj)
    return float(r[-1])


def dudley_integral(T: PointSet, metric: Metric | None = None) -> float:
    """Integral of sqrt(log N(eps)) over (0, diam(T)]."""
    prof = counting_profile(T, metric)
    widths = np.diff(prof["r"])
    return float(sum(w * math.sqrt(math.log(N)) for w, N in zip(widths, prof["N"])))


def u_branch(D: int, n: int) -> float:
    if D >= n:
        return math.sqrt(math.log(math.e * D / n))
    return math.exp(1.0 - math.sqrt(n / D))


def entropy_integral_u(T: PointSet, metric: Metric | None = None) -> float:
    """Integral over (0, diam(T)] of the two-branch packing profile u(eps), n = dim T."""
    prof = counting_profile(T, metric)
    widths = np.diff(prof["r"])
    return float(sum(w * u_branch(D, T.n) for w, D in zip(widths, prof["D"])))


def entropy_log_integral(T: PointSet, metric: Metric | None = None) -> float:
    """Integral of sqrt(log D(eps)) over (0, diam(T)] (packing version of Dudley's integral)."""
    prof = counting_profile(T, metric)
    widths = np.diff(prof["r"])
    return float(sum(w * math.sqrt(math.log(D)) for w, D in zip(widths, prof["D"])))


# -- admissible sequences ------------------------------------------------------


def level_size(s: int) -> float:
    return 1 if s == 0 else 2.0 ** (2 ** s) if s < 10 else math.inf


@dataclass(frozen=True, eq=False)
class AdmissibleSequence:
    """Nested levels T_0 ⊆ T_1 ⊆ ... ⊆ T_{s_max} = T over the distinct points of a set.

    ``levels[s]`` are point indices, ``nearest[s][i]`` is the index of pi_s(t_i).
    """

    points: PointSet
    metric: Metric
    levels: tuple
    nearest: tuple
    strategy: str = "greedy"

    @property
    def s_max(self) -> int:
        return len(self.levels) - 1

    def dist_to_level(self, s: int) -> np.ndarray:
        s = min(s, self.s_max)
        P = self.points.points
        return self.metric.norm(P - P[self.nearest[s]])

    def link(self, s: int) -> np.ndarray:
        """Chain increments pi_s(t) - pi_{s-1}(t) for every point (s >= 1)."""
        P = self.points.points
        return P[self.nearest[s]] - P[self.nearest[s - 1]]

    def validate(self) -> None:
        if len(self.levels[0]) != 1:
            raise AssertionError("|T_0| must be 1")
        for s, lev in enumerate(self.levels):
            if len(lev) > level_size(s):
                raise AssertionError(f"level {s} too large")
            if s and not set(self.levels[s - 1]) <= set(lev):
                raise AssertionError("levels are not nested")
        if sorted(self.levels[-1]) != list(range(len(self.points))):
            raise AssertionError("last level must be the whole set")


def _nearest(D: np.ndarray, members: Sequence[int]) -> np.ndarray:
    members = np.asarray(sorted(members))
    # argmin returns the first minimum, i.e. the lowest point index among ties
    return members[np.argmin(D[:, members], axis=1)]


def _assemble(P: PointSet, metric: Metric, D: np.ndarray, levels, strategy: str) -> AdmissibleSequence:
    levels = tuple(tuple(sorted(int(i) for i in lev)) for lev in levels)
    nearest = tuple(_nearest(D, lev) for lev in levels)
    for arr in nearest:
        arr.flags.writeable = False
    return AdmissibleSequence(P, metric, levels, nearest, strategy)


def farthest_point_order(D: np.ndarray, root: int | None = None) -> list[int]:
    """Farthest-point traversal, seeded at ``root`` or at the point minimising its max distance."""
    m = D.shape[0]
    start = int(np.argmin(D.max(axis=1))) if root is None else int(root)
    order = [start]
    mind = D[start].copy()
    mind[start] = -1.0
    for _ in range(m - 1):
        nxt = int(np.argmax(mind))
        order.append(nxt)
        mind = np.minimum(mind, D[nxt])
        mind[order] = -1.0
    return order


def _depth(m: int) -> int:
    s = 0
    while level_size(s) < m:
        s += 1
    return s


def build_admissible(
    T: PointSet,
    metric: Metric | None = None,
    strategy: str = "greedy",
    s0: int = 0,
    root: int | None = None,
) -> AdmissibleSequence:
    """Nested admissible sequence over the distinct points of T.

    ``greedy`` takes prefixes of a farthest-point traversal; ``exhaustive``
    (at most 6 distinct points) searches every nested sequence for the one
    minimising gamma_{2,s0}. ``root`` forces T_0 = {P[root]} for the greedy
    strategy, where P is ``T.dedup()``.
    """
    metric = metric or Metric()
    P = T.dedup()
    D = metric.pairwise(P.points)
    m = len(P)
    depth = _depth(m)
    if strategy == "greedy":
        order = farthest_point_order(D, root)
        levels = [order[: int(min(m, level_size(s)))] for s in range(depth + 1)]
        return _assemble(P, metric, D, levels, "greedy")
    if strategy == "exhaustive":
        if m > EXHAUSTIVE_SEQUENCE_LIMIT:
            raise SizeError(f"exhaustive admissible search supports at most {EXHAUSTIVE_SEQUENCE_LIMIT} distinct points, got {m}")
        best, best_levels = math.inf, None
        for levels in _nested_sequences(m, depth):
            seq = _assemble(P, metric, D, levels, "exhaustive")
            cost = _gamma2_cost(seq, s0)
            if cost < best - 1e-12:
                best, best_levels = cost, levels
        return _assemble(P, metric, D, best_levels, "exhaustive")
    raise ValueError(f"unknown strategy {strategy!r}")


def _nested_sequences(m: int, depth: int):
    everything = tuple(range(m))
    if depth == 0:
        yield [everything]
        return
    for t0 in range(m):
        if depth == 1:
            yield [(t0,), everything]
            continue
        # depth 2 only arises for 5 or 6 points: T_1 has 4 points and contains t0
        rest = [i for i in range(m) if i != t0]
        for extra in itertools.combinations(rest, 3):
            yield [(t0,), (t0,) + extra, everything]


def build_entropy_sequence(T: PointSet, schedule: "Schedule", metric: Metric | None = None, root: int | None = 0) -> AdmissibleSequence:
    """Top-down nested separated nets with |T_s| <= lambda_s.

    Starting from T_m = T for the first m with |T| <= lambda_m, each T_{s-1} is a
    greedy maximal separated subset of T_s at the smallest breakpoint radius for
    which it has at most lambda_{s-1} points. T_0 is the root (the origin when T
    was built with ``with_origin``).
    """
    metric = metric or Metric()
    P = T.dedup()
    D = metric.pairwise(P.points)
    m_pts = len(P)
    root = int(np.argmin(D.max(axis=1))) if root is None else int(root)
    if m_pts == 1:
        return _assemble(P, metric, D, [(0,)], "entropy")
    top = 1
    while min(schedule.lam(top), level_size(top)) < m_pts:
        top += 1
    levels: list = [None] * (top + 1)
    levels[top] = list(range(m_pts))
    r = _breakpoints(D)
    for s in range(top, 1, -1):
        cap = int(min(schedule.lam(s - 1), level_size(s - 1)))
        cur = [root] + [i for i in levels[s] if i != root]
        sub = D[np.ix_(cur, cur)]
        chosen = cur[:1]
        for rj in r:
            pick = _greedy_separated(sub > rj)
            if len(pick) <= cap:
                chosen = [cur[i] for i in pick]
                break
        levels[s - 1] = chosen
    levels[0] = [root]
    if top == 1:
        levels[1] = list(range(m_pts))
    return _assemble(P, metric, D, levels, "entropy")


def _gamma2_cost(seq: AdmissibleSequence, s0: int) -> float:
    total = np.zeros(len(seq.points))
    for s in range(s0, seq.s_max + 1):
        total += 2.0 ** (s / 2) * seq.dist_to_level(s)
    return float(total.max()) if total.size else 0.0


def gamma2(T: PointSet, metric: Metric | None = None, s0: int = 0, seq: AdmissibleSequence | None = None) -> float:
    """sup_t sum_{s >= s0} 2^{s/2} d(t, T_s) along ``seq``.

    An upper bound on gamma_{2,s0}(T, d); exact within the nested family when
    ``seq`` came from the exhaustive strategy with the same s0.
    """
    if seq is None:
        seq = build_admissible(T, metric)
    elif len(T.dedup()) != len(seq.points):
        raise ValueError("sequence was built over a different point set")
    return _gamma2_cost(seq, s0)


def minkowski_sequence(a: AdmissibleSequence, b: AdmissibleSequence) -> tuple[PointSet, list]:
    """Product sequence (A+B)_0 = A_0 + B_0, (A+B)_{s+1} = A_s + B_s, as point arrays per level."""
    A, B = a.points.points, b.points.points
    sums = (A[:, None, :] + B[None, :, :]).reshape(-1, A.shape[1])
    levels = []
    depth = max(a.s_max, b.s_max) + 1
    for s in range(depth + 1):
        src = max(s - 1, 0)
        la = a.levels[min(src, a.s_max)]
        lb = b.levels[min(src, b.s_max)]
        levels.append(np.array([A[i] + B[j] for i in la for j in lb]))
    return PointSet(sums), levels


def sequence_cost_from_levels(points: np.ndarray, levels: list, metric: Metric, s0: int) -> float:
    total = np.zeros(points.shape[0])
    for s in range(s0, len(levels)):
        total += 2.0 ** (s / 2) * metric.pairwise(points, levels[s]).min(axis=1)
    return float(total.max())


# -- schedules -----------------------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Entropy budget sequences (lambda_s, Q_s) for s >= 1 plus the constants used."""

    kind: str
    n: int
    constants: dict = field(default_factory=dict)
    s_n: int | None = None
    nu_n: int | None = None
    degenerate: bool = False
    lam_values: tuple | None = None
    q_values: tuple | None = None
    orientation: str = "proof"

    @property
    def length(self) -> int | None:
        return None if self.q_values is None else len(self.q_values)

    def q(self, s: int) -> float:
        c = self.constants
        if self.kind == "custom":
            return self.q_values[s - 1]
        if self.kind == "gamma":
            k4, k5 = c["k4"], c["k5"]
            if self.s_n is None or s > self.s_n:
                return k4 * 2.0 ** (s / 2)
            if s == self.s_n:
                return k4
            return k4 * math.exp(-k5 * math.sqrt(self.n))
        nu = self.nu_n
        if s <= nu:
            exponent = (nu - s) if self.orientation == "proof" else (s - nu)
            return c["c4"] * math.exp(-2.0 * 2.0 ** (exponent / 2))
        return c["c4"] * 2.0 ** ((s - nu) / 2)

    def log_lam(self, s: int) -> float:
        c = self.constants
        if self.kind == "custom":
            return math.log(self.lam_values[s - 1])
        if self.kind == "gamma":
            return (2.0 ** s) * math.log(2) if s < 1000 else math.inf
        nu = self.nu_n
        if s <= nu:
            return math.log(c["c2"]) + s * math.log(2)
        e = s - nu
        return math.log(c["c3"] * self.n) + ((2.0 ** e) - 1) * math.log(2) if e < 1000 else math.inf

    def lam(self, s: int) -> float:
        ll = self.log_lam(s)
        if ll >= 700:
            return math.inf
        c = self.constants
        if self.kind == "custom":
            return float(self.lam_values[s - 1])
        if self.kind == "gamma":
            return 2.0 ** (2 ** s)
        if s <= self.nu_n:
            return c["c2"] * 2.0 ** s
        return c["c3"] * self.n * 2.0 ** (2 ** (s - self.nu_n) - 1)

    def as_dict(self, s_max: int = 8) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "constants": dict(self.constants),
            "s_n": self.s_n,
            "nu_n": self.nu_n,
            "degenerate": self.degenerate,
            "q": [self.q(s) for s in range(1, (self.length or s_max) + 1)],
        }


def _sn(n: int, k3: float) -> int | None:
    best = None
    s = 0
    while 2.0 ** (2 ** (s + 1)) <= k3 * n:
        best = s
        s += 1
    return best


def schedule_gamma(n: int, kappa: dict | None = None) -> Schedule:
    """Three-branch Q_s around s_n = max{s : 2^{2^{s+1}} <= k3 n}; lambda_s = 2^{2^s}."""
    if n < 1:
        raise ValueError("n must be positive")
    c = {"k1": 1.0, "k2": 1.0, "k3": 1.0, "k4": 1.0, "k5": 1.0}
    c.update(kappa or {})
    sn = _sn(n, c["k3"])
    if sn is None:
        warnings.warn(f"s_n undefined for n={n}, k3={c['k3']}; using Q_s = k4 2^(s/2) for all s", stacklevel=2)
    return Schedule("gamma", n, c, s_n=sn, degenerate=sn is None)


def schedule_entropy(n: int, constants: dict | None = None, orientation: str = "proof") -> Schedule:
    """Two-branch (lambda_s, Q_s) around nu_n = max{s : 2^s <= c1 n}.

    ``orientation`` picks the sign of the exponent in Q_s for s <= nu_n:
    ``"proof"`` decays towards coarse levels, exp(-2 * 2^((nu - s)/2));
    ``"lemma"`` uses exp(-2 * 2^((s - nu)/2)). Both agree at s = nu.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if orientation not in ("proof", "lemma"):
        raise ValueError("orientation must be 'proof' or 'lemma'")
    c = {"k1": 1.0, "k2": 1.0, "c1": 1.0, "c2": 1.0, "c3": 1.0, "c4": 1.0}
    c.update(constants or {})
    nu = 0
    while 2 ** (nu + 1) <= c["c1"] * n:
        nu += 1
    return Schedule("entropy", n, c, nu_n=nu, orientation=orientation)


def custom_schedule(lam: Sequence[float], q: Sequence[float], n: int = 1, constants: dict | None = None) -> Schedule:
    if len(lam) != len(q):
        raise ValueError("lambda and Q must have equal length")
    c = {"k1": 1.0, "k2": 1.0}
    c.update(constants or {})
    return Schedule("custom", n, c, lam_values=tuple(lam), q_values=tuple(q))


def tau_m(m: int, k: int) -> int:
    """Smallest s with 2^{2^s} >= exp(m log(e k / m))."""
    target = m * math.log(math.e * k / m) / math.log(2)  # log2 of the right side
    s = 0
    while 2 ** s < target:
        s += 1
    return s
