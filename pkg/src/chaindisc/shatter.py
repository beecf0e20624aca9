"""Shattering at scale eps for finite classes and their absolute convex hulls.

A class is a finite point set T in R^n; coordinate i plays the role of the i-th
sample point, so f(x_i) is the i-th entry of a row.

Finite mode searches level candidates per coordinate. For a fixed side
assignment the feasible levels on coordinate i form an interval whose endpoints
are v - eps or v + eps for projected values v, so trying those values (and the
midpoints between consecutive values) is exact.

Hull mode works with absconv(T), the convex hull of T and -T. Because that set
is symmetric and convex, any levels s can be replaced by s = 0: averaging the
witness of a pattern with the negated witness of the complementary pattern
keeps the same margin. A pattern is then realized with margin eps iff the value
of the matrix game with payoff sign_i * v_i (rows v in T and -T, columns i in I)
is at least eps. The game is solved by an exact rational simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import chaining
from ._parallel import ordered_map, trial_rng
from .core import IndexSet, PointSet, PreconditionError, SizeError

MAX_SHATTER_INDICES = 16
HULL_LOWER_MAX_N = 8
HULL_LOWER_MAX_POINTS = 6
CLASSICAL_VC_MAX_N = 20


@dataclass(frozen=True)
class ShatterWitness:
    """Levels and one witness per pattern.

    Patterns are tuples of booleans aligned with ``indices`` (True means above).
    In finite mode ``assignment`` maps a pattern to a row index of T. In hull mode
    it maps a pattern to exact convex weights over the rows of ``basis``.
    """

    indices: IndexSet
    levels: tuple
    eps: Fraction
    hull: bool
    assignment: dict = field(repr=False)
    basis: np.ndarray | None = field(default=None, repr=False)

    def witness_point(self, T: PointSet, pattern: tuple) -> list:
        """The witnessing vector restricted to ``indices``, as exact Fractions."""
        cols = self.indices.as_array()
        if not self.hull:
            return [Fraction(float(v)) for v in T.points[self.assignment[pattern], cols]]
        w = self.assignment[pattern]
        B = self.basis[:, cols]
        return [sum((wj * Fraction(float(B[j, c])) for j, wj in enumerate(w) if wj), Fraction(0))
                for c in range(len(cols))]

    def validate(self, T: PointSet) -> bool:
        """Replay every defining inequality in exact arithmetic."""
        k = len(self.indices)
        for pattern in itertools.product((True, False), repeat=k):
            if pattern not in self.assignment:
                return False
            if self.hull:
                w = self.assignment[pattern]
                if any(x < 0 for x in w) or sum(w) != 1:
                    return False
            f = self.witness_point(T, pattern)
            for fi, si, up in zip(f, self.levels, pattern):
                if up and fi < si + self.eps:
                    return False
                if not up and fi > si - self.eps:
                    return False
        return True

    def as_dict(self) -> dict:
        out = {
            "indices": [i + 1 for i in self.indices],
            "levels": [float(s) for s in self.levels],
            "eps": float(self.eps),
            "hull": self.hull,
        }
        pats = {}
        for p, w in self.assignment.items():
            key = "".join("1" if b else "0" for b in p)
            pats[key] = [float(x) for x in w] if self.hull else int(w)
        out["assignment"] = pats
        return out


# -- exact simplex -----------------------------------------------------------------


def _game_value(M: list[list[Fraction]]) -> tuple[Fraction, list[Fraction]]:
    """Value and an optimal mixed strategy of the maximizing row player.

    Solves max sum(y) s.t. M' y <= 1, y >= 0 with M' = M + c > 0, by a dense
    tableau simplex using Bland's rule. The row strategy is read off the
    objective coefficients of the slack columns.
    """
    rows, cols = len(M), len(M[0])
    shift = 1 - min(min(r) for r in M)
    width = cols + rows + 1
    tab = []
    for j, r in enumerate(M):
        line = [x + shift for x in r] + [Fraction(0)] * rows + [Fraction(1)]
        line[cols + j] = Fraction(1)
        tab.append(line)
    obj = [Fraction(-1)] * cols + [Fraction(0)] * (rows + 1)
    basis = [cols + j for j in range(rows)]
    while True:
        enter = next((c for c in range(width - 1) if obj[c] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for j in range(rows):
            a = tab[j][enter]
            if a > 0:
                ratio = tab[j][-1] / a
                if best is None or ratio < best or (ratio == best and basis[j] < basis[leave]):
                    best, leave = ratio, j
        if leave is None:  # cannot happen: M' > 0 bounds the feasible region
            raise RuntimeError("unbounded game LP")
        piv = tab[leave][enter]
        prow = [x / piv for x in tab[leave]]
        tab[leave] = prow
        for j in range(rows):
            if j != leave and tab[j][enter] != 0:
                f = tab[j][enter]
                tab[j] = [a - f * b for a, b in zip(tab[j], prow)]
        f = obj[enter]
        obj = [a - f * b for a, b in zip(obj, prow)]
        basis[leave] = enter
    total = obj[-1]  # optimal sum(y) = 1 / (value + shift)
    x = [obj[cols + j] for j in range(rows)]
    lam = [xj / total for xj in x]
    return 1 / total - shift, lam


def _exact_matrix(A: np.ndarray) -> list[list[Fraction]]:
    return [[Fraction(float(v)) for v in row] for row in A]


def _sym_basis(T: PointSet) -> np.ndarray:
    """Rows of T followed by their negatives; row j and row j + m are opposite."""
    P = T.dedup().points
    return np.vstack([P, -P])


def _pattern_margin(Bx: list[list[Fraction]], cols: Sequence[int], pattern: Sequence[bool]):
    M = [[v[c] if up else -v[c] for c, up in zip(cols, pattern)] for v in Bx]
    return _game_value(M)


def _hull_min_margin(Bx, cols: Sequence[int], floor: Fraction | None = None) -> Fraction:
    """min over patterns of the game value; stops early once below ``floor``."""
    k = len(cols)
    worst = None
    # complementary patterns have equal value on a symmetric set, so fix the first side
    for rest in itertools.product((True, False), repeat=k - 1):
        val, _ = _pattern_margin(Bx, cols, (True,) + rest)
        if worst is None or val < worst:
            worst = val
        if floor is not None and worst < floor:
            break
    return worst


def _hull_witness(T: PointSet, I: IndexSet, eps: Fraction) -> ShatterWitness | None:
    B = _sym_basis(T)
    Bx = _exact_matrix(B)
    half = B.shape[0] // 2
    cols = list(I)
    assignment = {}
    for rest in itertools.product((True, False), repeat=len(cols) - 1):
        pat = (True,) + rest
        val, lam = _pattern_margin(Bx, cols, pat)
        if val < eps:
            return None
        assignment[pat] = tuple(lam)
        comp = tuple(not b for b in pat)
        assignment[comp] = tuple(lam[half:] + lam[:half])
    return ShatterWitness(I, tuple(Fraction(0) for _ in cols), eps, True, assignment, B)


# -- finite classes ----------------------------------------------------------------


def _level_candidates(values: Iterable[Fraction], eps: Fraction) -> list[Fraction]:
    v = sorted(set(values))
    cand = {x - eps for x in v} | {x + eps for x in v}
    cand |= {(a + b) / 2 for a, b in zip(v, v[1:])}
    return sorted(cand)


def _finite_witness(T: PointSet, I: IndexSet, eps: Fraction) -> ShatterWitness | None:
    P = T.dedup().points
    cols = list(I)
    k = len(cols)
    if P.shape[0] < (1 << k):
        return None
    X = [[Fraction(float(P[r, c])) for c in cols] for r in range(P.shape[0])]
    cands = [_level_candidates((row[i] for row in X), eps) for i in range(k)]

    # side[r] is the partial pattern of row r (None once r fails a chosen level)
    def search(i: int, sides: list, levels: list):
        alive = [s for s in sides if s is not None]
        if len(set(alive)) < (1 << i):
            return None
        if i == k:
            return levels
        for s in cands[i]:
            nxt = []
            for r, prev in enumerate(sides):
                if prev is None:
                    nxt.append(None)
                elif X[r][i] >= s + eps:
                    nxt.append(prev + (True,))
                elif X[r][i] <= s - eps:
                    nxt.append(prev + (False,))
                else:
                    nxt.append(None)
            alive = {p for p in nxt if p is not None}
            if len(alive) < (1 << (i + 1)):
                continue
            found = search(i + 1, nxt, levels + [s])
            if found is not None:
                return found
        return None

    levels = search(0, [()] * len(X), [])
    if levels is None:
        return None
    assignment = {}
    for r, row in enumerate(X):
        pat = []
        for x, s in zip(row, levels):
            if x >= s + eps:
                pat.append(True)
            elif x <= s - eps:
                pat.append(False)
            else:
                break
        else:
            assignment.setdefault(tuple(pat), int(np.flatnonzero((T.points == P[r]).all(axis=1))[0]))
    return ShatterWitness(I, tuple(levels), eps, False, assignment)


# -- public API ----------------------------------------------------------------------


def _as_fraction(eps) -> Fraction:
    e = Fraction(eps) if isinstance(eps, Fraction) else Fraction(float(eps))
    if not e > 0:
        raise ValueError("eps must be positive")
    return e


def is_shattered(T: PointSet, I: IndexSet, eps: float, hull: bool = False) -> ShatterWitness | None:
    """A witness that T (or absconv(T) when ``hull``) eps-shatters the coordinates I."""
    if len(I) > MAX_SHATTER_INDICES:
        raise SizeError(f"is_shattered supports |I| <= {MAX_SHATTER_INDICES}")
    I.check_bounds(T.n)
    e = _as_fraction(eps)
    return _hull_witness(T, I, e) if hull else _finite_witness(T, I, e)


def _grow(n: int, accept) -> list[tuple]:
    """Down-closed family search: sets of size k + 1 are tried only if all their k-subsets passed."""
    level = [()]
    best = [()]
    while level:
        passed = set(level)
        nxt = []
        for base in level:
            start = base[-1] + 1 if base else 0
            for j in range(start, n):
                cand = base + (j,)
                if len(cand) > 1 and any(cand[:q] + cand[q + 1:] not in passed for q in range(len(cand))):
                    continue
                if accept(cand):
                    nxt.append(cand)
        if nxt:
            best = nxt
        level = nxt
    return best


def vc_dim(T: PointSet, eps: float, hull: bool = False, return_witness: bool = False):
    """Largest |I| that is eps-shattered by T (or by absconv(T))."""
    if T.n > MAX_SHATTER_INDICES:
        raise SizeError(f"vc_dim supports n <= {MAX_SHATTER_INDICES}")
    e = _as_fraction(eps)
    if hull:
        Bx = _exact_matrix(_sym_basis(T))
        accept = lambda c: _hull_min_margin(Bx, c, e) >= e  # noqa: E731
    else:
        m = len(T.dedup())
        accept = lambda c: m >= (1 << len(c)) and _finite_witness(T, IndexSet(c), e) is not None  # noqa: E731
    best = _grow(T.n, accept)
    d = len(best[0])
    if not return_witness:
        return d
    wit = is_shattered(T, IndexSet(best[0]), e, hull) if d else None
    return d, wit


def classical_vc(T: PointSet) -> int:
    """VC dimension of a {0,1}-valued class by counting projected patterns."""
    A = T.points
    if not np.all((A == 0) | (A == 1)):
        raise PreconditionError("classical_vc needs entries in {0, 1}")
    if T.n > CLASSICAL_VC_MAX_N:
        raise SizeError(f"classical_vc supports n <= {CLASSICAL_VC_MAX_N}")
    rows = A.astype(np.int64)
    m = len(np.unique(rows, axis=0))

    def accept(c):
        k = len(c)
        if m < (1 << k):
            return False
        codes = rows[:, list(c)] @ (1 << np.arange(k))
        return np.unique(codes).size == (1 << k)

    return len(_grow(T.n, accept)[0])


def default_delta_grid(T: PointSet, size: int = 20) -> list[float]:
    top = float(np.abs(T.points).max())
    if top == 0:
        return []
    return [top * j / size for j in range(1, size + 1)]


def hull_margin_profile(T: PointSet, floor: float) -> dict:
    """min-pattern game value m(I) for every I reachable above ``floor``.

    m is nonincreasing along inclusion, so a set is examined only when all its
    maximal proper subsets reached ``floor``.
    """
    Bx = _exact_matrix(_sym_basis(T))
    f = _as_fraction(floor)
    margins: dict = {}

    def accept(c):
        val = _hull_min_margin(Bx, c, f)
        margins[c] = val
        return val >= f

    _grow(T.n, accept)
    return margins


def hdisc_vc_lower(T: PointSet, delta_grid: Sequence[float] | None = None) -> float:
    """sup over the grid of delta * VC(absconv(T), delta)."""
    if T.n > HULL_LOWER_MAX_N or len(T) > HULL_LOWER_MAX_POINTS:
        raise SizeError(f"hdisc_vc_lower supports n <= {HULL_LOWER_MAX_N} and |T| <= {HULL_LOWER_MAX_POINTS}")
    grid = default_delta_grid(T) if delta_grid is None else [float(d) for d in delta_grid]
    if not grid or not np.any(T.points):
        return 0.0
    deltas = sorted(Fraction(d) for d in grid)
    margins = hull_margin_profile(T, deltas[0])
    best = Fraction(0)
    for d in deltas:
        vc = max((len(c) for c, v in margins.items() if v >= d), default=0)
        best = max(best, d * vc)
    return float(best)


def haussler_check(
    T: PointSet,
    d: int,
    eps_grid: Sequence[float] | None = None,
    samples: int = 8,
    seed: int = 0,
    threads: int | None = None,
) -> dict:
    """Implied constant max D(eps, P_I T) * (eps / sqrt|I|)^{2d} over sampled I and an eps grid.

    When n is small the declared d is compared with the classical VC dimension and
    a violation is flagged.
    """
    A = T.points
    if not np.all((A == 0) | (A == 1)):
        raise PreconditionError("haussler_check needs entries in {0, 1}")
    if d < 1:
        raise ValueError("d must be at least 1")
    n = T.n
    measured = classical_vc(T) if n <= 12 else None
    jobs = []
    for q in range(samples):
        rng = trial_rng(seed, q)
        size = int(rng.integers(1, n + 1))
        I = np.sort(rng.choice(n, size=size, replace=False))
        jobs.append(I)

    def one(I):
        P = PointSet(A[:, I]).dedup()
        root = math.sqrt(I.size)
        grid = eps_grid if eps_grid is not None else [root * j / 8 for j in range(1, 9)]
        out = []
        for eps in grid:
            D = chaining.packing_number(P, eps)
            out.append({"size": int(I.size), "eps": float(eps), "D": int(D),
                        "implied": D * (eps / root) ** (2 * d)})
        return out

    rows = [r for chunk in ordered_map(one, jobs, threads) for r in chunk]
    worst = max(rows, key=lambda r: r["implied"])
    return {
        "declared_d": d,
        "measured_vc": measured,
        "violation": measured is not None and measured > d,
        "implied_constant": worst["implied"],
        "argmax": worst,
        "rows": rows,
    }


def sign_embedding_scatter(T: PointSet, deltas: Sequence[float] | None = None) -> dict:
    """Descriptive (delta, VC(absconv(T), delta)) pairs next to E sup_t |sum eps_i t_i| / k.

    Nothing is asserted; the measured numbers are reported as they come.
    """
    from .coloring import _distinct_rows, _signs

    n = T.n
    if n > HULL_LOWER_MAX_N:
        raise SizeError(f"sign_embedding_scatter supports n <= {HULL_LOWER_MAX_N}")
    A = _distinct_rows(T)
    E = _signs(n, 0, 1 << n, fixed_first=False).astype(float)
    mean_sup = float(np.abs(E @ A.T).max(axis=1).mean()) if A.shape[0] else 0.0
    grid = default_delta_grid(T) if deltas is None else list(deltas)
    rows = []
    if grid:
        margins = hull_margin_profile(T, min(grid))
        for dl in grid:
            f = Fraction(float(dl))
            vc = max((len(c) for c, v in margins.items() if v >= f), default=0)
            rows.append({"delta": float(dl), "vc": vc, "vc_over_k": vc / n})
    return {"k": n, "mean_sup_over_k": mean_sup / n, "rows": rows}
