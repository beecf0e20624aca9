"""Subgaussian-process laboratory for linear classes f_t(x) = <t, x>.

A class is an index set T in R^d together with an isotropic measure mu on R^d.
A sample sigma = (X_1, ..., X_k) turns it into the point set
P_sigma F = {(<t, X_i>)_{i<=k} : t in T} in R^k.

Norms on sampled coordinates are normalized: ||f||_{L2^I} is the root mean
square of f(X_i) over i in I. Under isotropy ||f_t||_{L2} = |t|.

Every Monte Carlo routine splits its trials into fixed blocks, and each block
draws from its own stream keyed by (seed, tag, block). Results therefore do
not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import chaining
from ._parallel import ordered_map, trial_rng
from .coloring import _signs, disc_heuristic
from .core import ATOL, PointSet, SizeError, weak_l2_radius

EMP_EXACT_LIMIT = 20
_BLOCK = 256
_SIGN_CHUNK = 1 << 15

_KIND_ALIASES = {
    "gaussian": "gaussian",
    "gaussian-isotropic": "gaussian",
    "cube": "cube",
    "cube-uniform": "cube",
    "custom": "custom",
    "custom-bounded": "custom",
}


@dataclass(frozen=True)
class MeasureSpec:
    """Product measure on R^dim with i.i.d. coordinates.

    ``gaussian`` has standard normal coordinates, ``cube`` uniform signs, and
    ``custom`` draws each coordinate from ``values`` with ``probs``. A custom
    marginal must have mean 0 and variance 1, and declares its own ``L``.
    """

    kind: str
    dim: int
    values: tuple | None = None
    probs: tuple | None = None
    L: float = 1.0

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if kind == "custom":
            if self.values is None or self.probs is None:
                raise ValueError("custom measure needs values and probs")
            v = np.asarray(self.values, dtype=float)
            p = np.asarray(self.probs, dtype=float)
            if v.shape != p.shape or v.ndim != 1 or v.size == 0:
                raise ValueError("values and probs must be equal-length vectors")
            if np.any(p < 0) or abs(p.sum() - 1) > ATOL or not np.all(np.isfinite(v)):
                raise ValueError("probs must be a probability vector over finite values")
            if abs(float(p @ v)) > 1e-9 or abs(float(p @ (v * v)) - 1) > 1e-9:
                raise ValueError("custom marginal must have mean 0 and variance 1")
            object.__setattr__(self, "values", tuple(v.tolist()))
            object.__setattr__(self, "probs", tuple(p.tolist()))

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal((k, self.dim))
        if self.kind == "cube":
            return rng.choice(np.array([-1.0, 1.0]), size=(k, self.dim))
        return rng.choice(np.asarray(self.values), p=np.asarray(self.probs), size=(k, self.dim))

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim, "L": self.L}
        if self.kind == "custom":
            out.update(values=list(self.values), probs=list(self.probs))
        return out


@dataclass(frozen=True)
class LinearClass:
    index_set: PointSet
    measure: MeasureSpec

    def __post_init__(self):
        if self.index_set.n != self.measure.dim:
            raise ValueError(f"index set lives in R^{self.index_set.n}, measure in R^{self.measure.dim}")

    @property
    def sigma_F(self) -> float:
        return float(np.linalg.norm(self.index_set.points, axis=1).max())

    @property
    def diam(self) -> float:
        return self.index_set.diameter()


@dataclass(frozen=True)
class SampleWindow:
    sigma: np.ndarray = field(repr=False)
    seed: int

    @property
    def k(self) -> int:
        return self.sigma.shape[0]


def sample_window(measure: MeasureSpec, k: int, seed: int) -> SampleWindow:
    if k < 1:
        raise ValueError("k must be at least 1")
    X = measure.sample(trial_rng(seed, 0), k)
    X.flags.writeable = False
    return SampleWindow(X, seed)


def project_class(cls: LinearClass, win: SampleWindow) -> PointSet:
    return PointSet(cls.index_set.points @ win.sigma.T)


def sample_projection(cls: LinearClass, k: int, seed: int) -> tuple[SampleWindow, PointSet]:
    """sigma and P_sigma F = {(<t, X_i>)_i : t in T}."""
    win = sample_window(cls.measure, k, seed)
    return win, project_class(cls, win)


# -- estimators -----------------------------------------------------------------


def psi2_estimate(samples) -> float:
    """max over p in {2, 4, ..., 16} of ||x||_p / sqrt(p), with empirical moments."""
    x = np.abs(np.asarray(samples, dtype=float).ravel())
    if x.size < 100:
        raise ValueError("psi2_estimate needs at least 100 samples")
    top = float(x.max())
    if top == 0:
        return 0.0
    y = x / top
    return top * max(float(np.mean(y ** p)) ** (1.0 / p) / math.sqrt(p) for p in range(2, 17, 2))


def _blocks(trials: int, block: int = _BLOCK) -> list[tuple[int, int]]:
    return [(b, min(block, trials - b * block)) for b in range((trials + block - 1) // block)]


def _mean_ci(x: np.ndarray, z: float = 1.96) -> dict:
    mean = float(x.mean())
    half = z * float(x.std(ddof=1)) / math.sqrt(x.size) if x.size > 1 else 0.0
    return {"mean": mean, "ci": [mean - half, mean + half], "trials": int(x.size)}


def emp_sign_sup(V: PointSet, mode: str = "exact", trials: int = 2000, seed: int = 0, threads: int | None = None) -> dict:
    """E_eps sup_{v in V} |sum_i eps_i v_i|, by enumeration or Monte Carlo."""
    A = V.points
    k = V.n
    if mode == "exact":
        if k > EMP_EXACT_LIMIT:
            raise SizeError(f"exact mode supports k <= {EMP_EXACT_LIMIT}")
        total = 1 << (k - 1)  # eps and -eps give the same sup
        acc = 0.0
        for start in range(0, total, _SIGN_CHUNK):
            E = _signs(k, start, min(_SIGN_CHUNK, total - start), fixed_first=True).astype(float)
            acc += float(np.abs(E @ A.T).max(axis=1).sum())
        mean = acc / total
        return {"mean": mean, "ci": [mean, mean], "exact": True, "trials": total}
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")

    def block(b):
        idx, size = b
        E = trial_rng(seed, 11, idx).choice(np.array([-1.0, 1.0]), size=(size, k))
        return np.abs(E @ A.T).max(axis=1)

    vals = np.concatenate(ordered_map(block, _blocks(trials), threads))
    out = _mean_ci(vals)
    out["exact"] = False
    return out


def gauss_mean_width(V: PointSet, trials: int = 1000, seed: int = 0, threads: int | None = None) -> dict:
    """Monte Carlo E sup_{v in V} |<g, v>| with a normal-approximation CI."""
    if trials < 100:
        raise ValueError("gauss_mean_width needs at least 100 trials")
    A = V.points

    def block(b):
        idx, size = b
        G = trial_rng(seed, 13, idx).standard_normal((size, V.n))
        return np.abs(G @ A.T).max(axis=1)

    return _mean_ci(np.concatenate(ordered_map(block, _blocks(trials), threads)))


# -- decomposition ----------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """t = t1 + t2 with t2 = pi_{tau_m}(t) along a greedy admissible sequence."""

    m: int
    k: int
    tau_m: int
    f1_part: np.ndarray = field(repr=False)
    f2_part: np.ndarray = field(repr=False)
    net: np.ndarray = field(repr=False)
    gamma_tau: float
    depth: int
    L: float = 1.0

    @property
    def degenerate(self) -> bool:
        return not np.any(self.f1_part)

    def reconstruction_error(self, T: PointSet) -> float:
        return float(np.abs(self.f1_part + self.f2_part - T.points).max())


def decompose(cls: LinearClass, k: int, m: int) -> Decomposition:
    """Split every t at pi_{tau_m}(t) of a greedy admissible sequence of T.

    The psi2 metric of a linear class under an isotropic L-subgaussian measure is
    taken as L times the Euclidean one; the greedy sequence does not depend on
    the scale, and ``gamma_tau`` is reported in the L2 metric.
    """
    if not 1 <= m <= k:
        raise ValueError("need 1 <= m <= k")
    T = cls.index_set
    seq = chaining.build_admissible(T)
    tau = chaining.tau_m(m, k)
    P = seq.points.points
    # map every row of T to its distinct representative
    rep = np.array([int(np.flatnonzero((P == row).all(axis=1))[0]) for row in T.points])
    s = min(tau, seq.s_max)
    near = seq.nearest[s][rep]
    f2 = P[near]
    f1 = T.points - f2
    gamma_tau = chaining.gamma2(T, s0=tau, seq=seq)
    return Decomposition(m, k, tau, f1, f2, np.unique(near), gamma_tau, seq.s_max, cls.measure.L)


def _top_m_index(x: np.ndarray, m: int) -> np.ndarray:
    return np.argsort(-np.abs(x), kind="stable")[:m]


def verify_weak_l2_containment(dec: Decomposition, win: SampleWindow, I_samples: int = 200, seed: int = 0) -> dict:
    """Smallest r(I) with P_I F1 in r W_m, worst over sampled I and over the exact worst I.

    For a fixed vector the top-m coordinates maximise every rearranged entry at
    once, so the worst I per function is known exactly. The empirical c1 is the
    worst r divided by gamma_{2,tau_m}; it is 0 when F1 vanishes.
    """
    k, m = win.k, dec.m
    Y = dec.f1_part @ win.sigma.T  # (|T|, k)
    exact_worst = max((weak_l2_radius(y[_top_m_index(y, m)]) for y in Y), default=0.0)
    rng = trial_rng(seed, 17)
    sampled = 0.0
    for _ in range(I_samples):
        I = rng.choice(k, size=m, replace=False)
        sampled = max(sampled, max(weak_l2_radius(y[I]) for y in Y))
    exhaustive = None
    if m <= 3 or k <= 12:
        from itertools import combinations

        exhaustive = max(max(weak_l2_radius(y[list(I)]) for y in Y) for I in combinations(range(k), m))
    if exact_worst == 0:
        c1 = 0.0
    elif dec.gamma_tau > 0:
        c1 = exact_worst / dec.gamma_tau
    else:
        c1 = math.inf
    return {
        "m": m, "k": k, "tau_m": dec.tau_m, "gamma_tau": dec.gamma_tau,
        "r_worst": exact_worst, "r_sampled": sampled, "r_exhaustive": exhaustive,
        "I_samples": I_samples, "c1": c1, "degenerate": dec.degenerate,
    }


def _pair_list(n: int, pair_samples: int | None, rng: np.random.Generator) -> list[tuple[int, int]]:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if pair_samples is None or len(pairs) <= pair_samples:
        return pairs
    pick = rng.choice(len(pairs), size=pair_samples, replace=False)
    return [pairs[i] for i in np.sort(pick)]


def verify_shrinking(
    dec: Decomposition, win: SampleWindow, m: int | None = None, pair_samples: int | None = None,
    I_samples: int = 0, seed: int = 0,
) -> dict:
    """Empirical c2 over pairs of F2 (worst I exact) and the sqrt(2) check of the full-sample norm."""
    k = win.k
    m = dec.m if m is None else m
    net = np.unique(dec.f2_part, axis=0)
    rng = trial_rng(seed, 19)
    log_term = math.sqrt(math.log(math.e * k / m))
    c2, iso, sampled, used, skipped = 0.0, 0.0, 0.0, 0, 0
    for i, j in _pair_list(net.shape[0], pair_samples, rng):
        diff = net[i] - net[j]
        l2 = float(np.linalg.norm(diff))
        if l2 == 0:
            skipped += 1
            continue
        x = win.sigma @ diff
        top = np.sort(x * x)[::-1][:m]
        c2 = max(c2, math.sqrt(top.mean()) / (log_term * l2))
        full = math.sqrt(float(np.mean(x * x)))
        iso = max(iso, l2 / full if full > 0 else math.inf)
        for _ in range(I_samples):
            I = rng.choice(k, size=m, replace=False)
            sampled = max(sampled, math.sqrt(float(np.mean(x[I] ** 2))) / (log_term * l2))
        used += 1
    return {
        "m": m, "k": k, "pairs": used, "skipped": skipped, "c2": c2, "c2_sampled": sampled,
        "I_samples": I_samples, "iso_ratio": iso, "sqrt2_violated": iso > math.sqrt(2),
    }


def shrink_single(t, measure: MeasureSpec, k: int, trials: int = 1000, seed: int = 0, threads: int | None = None) -> dict:
    """Per trial: sup over m of max_{|I|=m} ||f_t||_{L2^I} / (sqrt(log(ek/m)) |t|), worst I = top m."""
    if trials < 100:
        raise ValueError("shrink_single needs at least 100 trials")
    t = np.asarray(t, dtype=float)
    norm = float(np.linalg.norm(t))
    ms = np.arange(1, k + 1)
    log_term = np.sqrt(np.log(math.e * k / ms))

    def block(b):
        idx, size = b
        rng = trial_rng(seed, 23, idx)
        out = np.empty(size)
        for q in range(size):
            x = measure.sample(rng, k) @ t
            if norm == 0:
                out[q] = 0.0
                continue
            sq = np.sort(x * x)[::-1]
            out[q] = float((np.sqrt(np.cumsum(sq) / ms) / log_term).max()) / norm
        return out

    vals = np.concatenate(ordered_map(block, _blocks(trials, 64), threads))
    return {
        "k": k, "trials": trials, "norm": norm,
        "quantiles": {str(q): float(np.quantile(vals, q / 100)) for q in (50, 90, 95, 99)},
        "max": float(vals.max()), "values": vals.tolist(),
    }


def order_stats(n: int, trials: int = 2000, seed: int = 0, m_grid: Sequence[int] | None = None, threads: int | None = None) -> dict:
    """Monte Carlo E g_i^* and (E sum_{i<=m} (g_i^*)^2)^{1/2} for i.i.d. standard Gaussians."""
    if trials < 100:
        raise ValueError("order_stats needs at least 100 trials")
    if m_grid is None:
        m_grid = [m for m in (1, 4, 16, 64, 256, 1024) if m <= n]

    def block(b):
        idx, size = b
        g = np.abs(trial_rng(seed, 29, idx).standard_normal((size, n)))
        g = -np.sort(-g, axis=1)
        return g.sum(axis=0), (g * g).cumsum(axis=1).sum(axis=0)

    parts = ordered_map(block, _blocks(trials), threads)
    mean = sum(p[0] for p in parts) / trials
    cum_sq = sum(p[1] for p in parts) / trials
    i = np.arange(1, n + 1)
    half = i[i <= n / 2]
    ratios = mean[: half.size] / np.sqrt(np.log(2 * n / half)) if half.size else np.array([])
    m_rows = []
    for m in m_grid:
        val = math.sqrt(cum_sq[m - 1])
        m_rows.append({"m": int(m), "value": val, "ratio": val / math.sqrt(m * math.log(math.e * n / m))})
    return {
        "n": n, "trials": trials, "mean": mean.tolist(),
        "ratio_min": float(ratios.min()) if ratios.size else None,
        "ratio_max": float(ratios.max()) if ratios.size else None,
        "ratios": ratios.tolist(), "m_rows": m_rows,
    }


def _worst_I_width(v: np.ndarray, m: int) -> float:
    """l*(P_I {v}) = sqrt(2/pi) |P_I v|, largest at the top-m coordinates."""
    top = np.sort(np.abs(v))[::-1][:m]
    return math.sqrt(2 / math.pi) * float(np.linalg.norm(top))


def meanwidth_ratio(
    cls: LinearClass, k: int, m_grid: Sequence[int], I_samples: int = 50, trials: int = 1000,
    seed: int = 0, threads: int | None = None,
) -> dict:
    """max over sampled I of l*(P_I V) / (sqrt((m/k) log(ek/m)) l*(T)) with V = k^{-1/2} Gamma T.

    The single-vector lower experiment uses T = {t} with the first index point
    and the worst I (top-m coordinates), where l* has a closed form.
    """
    win, PT = sample_projection(cls, k, seed)
    V = PT.points / math.sqrt(k)
    width_T = gauss_mean_width(cls.index_set, trials, seed, threads)["mean"]
    t0 = cls.index_set.points[0]
    v0 = (win.sigma @ t0) / math.sqrt(k)
    rows = []
    for m in m_grid:
        scale = math.sqrt((m / k) * math.log(math.e * k / m))
        rng = trial_rng(seed, 31, m)
        Is = [np.sort(rng.choice(k, size=m, replace=False)) for _ in range(I_samples)]

        def one(q):
            return gauss_mean_width(PointSet(V[:, Is[q]]), trials, seed * 7919 + q, 1)["mean"]

        widths = ordered_map(one, range(I_samples), threads)
        upper = max(widths) / (scale * width_T) if width_T > 0 else 0.0
        t_norm = float(np.linalg.norm(t0))
        lower = _worst_I_width(v0, m) / (math.sqrt(2 / math.pi) * t_norm) if t_norm > 0 else 0.0
        rows.append({"m": m, "scale": scale, "upper_ratio": upper, "lower_value": lower,
                     "lower_ratio": lower / scale})
    return {"k": k, "width_T": width_T, "I_samples": I_samples, "trials": trials, "rows": rows}


def almost_isometry(
    cls: LinearClass, k: int, trials: int = 200, A_estimate: float | None = None, kappa7: float = 1.0,
    seed: int = 0, threads: int | None = None,
) -> dict:
    """Violation rate of sqrt(1/2)|t| <= ||f_t||_{L2^k} <= sqrt(3/2)|t| among |t| >= kappa7 A / sqrt(k)."""
    T = cls.index_set.points
    A = chaining.gamma2(cls.index_set) if A_estimate is None else float(A_estimate)
    threshold = kappa7 * A / math.sqrt(k)
    norms = np.linalg.norm(T, axis=1)
    above = (norms >= threshold) & (norms > 0)
    Ta, na = T[above], norms[above]

    def one(q):
        X = cls.measure.sample(trial_rng(seed, 37, q), k)
        emp = np.sqrt(np.mean((X @ Ta.T) ** 2, axis=0)) if Ta.size else np.zeros(0)
        bad = (emp * emp < 0.5 * na * na) | (emp * emp > 1.5 * na * na)
        return int(bad.sum())

    viol = ordered_map(one, range(trials), threads)
    n_above = int(above.sum())
    total = n_above * trials
    return {
        "k": k, "trials": trials, "A": A, "kappa7": kappa7, "threshold": threshold,
        "above": n_above, "violations": int(sum(viol)),
        "rate": sum(viol) / total if total else 0.0,
        "per_trial": [v / n_above if n_above else 0.0 for v in viol],
    }


def truncate_split(V: PointSet, beta: float) -> tuple[PointSet, PointSet]:
    """Clamp every coordinate to [-beta, beta]; the residual carries the excess."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    low = np.clip(V.points, -beta, beta)
    return PointSet(low), PointSet(V.points - low)


def eval_a_n(
    n: int, k: int, gamma: float | Callable[[int], float], diam: float, rho: float,
    c1: float = 1.0, c2: float = 1.0,
) -> float:
    """c1 (gamma_{2,s}(F) sqrt(log(ek/n)) + diam log(k) / n^{1/2-rho}), s = log2 log2 (c2 n).

    ``gamma`` is either the value itself or a map from the level s to gamma_{2,s};
    s is rounded down and taken as 0 when c2 n <= 2.
    """
    if not 0 < rho < 0.5:
        raise ValueError("rho must lie in (0, 1/2)")
    if not 1 <= n <= k:
        raise ValueError("need 1 <= n <= k")
    if callable(gamma):
        s = int(math.floor(math.log2(math.log2(c2 * n)))) if c2 * n > 2 else 0
        g = gamma(max(s, 0))
    else:
        g = float(gamma)
    return c1 * (g * math.sqrt(math.log(math.e * k / n)) + diam * math.log(k) / n ** (0.5 - rho))


def _alpha_bound(cls: LinearClass, k: int, rho: float, seq, c1: float, c2: float) -> float:
    gam = lambda s: chaining.gamma2(cls.index_set, s0=s, seq=seq)  # noqa: E731
    return max(math.sqrt(n / k) * eval_a_n(n, k, gam, cls.diam, rho, c1, c2) for n in range(1, k + 1))


def gap_experiment(
    cls: LinearClass, k_list: Sequence[int], budget: int = 256, trials: int = 20, rho: float = 0.25,
    seed: int = 0, mc_trials: int = 2000, threads: int | None = None, c1: float = 1.0, c2: float = 1.0,
) -> dict:
    """r_k = disc upper bound / E_eps sup on P_sigma F, per k and trial, plus the bound curve."""
    sigma_F = cls.sigma_F
    seq = chaining.build_admissible(cls.index_set)
    jobs = [(k, q) for k in k_list for q in range(trials)]

    def one(job):
        k, q = job
        trial_seed = int(trial_rng(seed, 41, k, q).integers(2**31))
        _, V = sample_projection(cls, k, trial_seed)
        mode = "exact" if k <= EMP_EXACT_LIMIT else "mc"
        esup = emp_sign_sup(V, mode, mc_trials, trial_seed, 1)["mean"]
        disc = disc_heuristic(V, budget=budget, seed=trial_seed).value
        return {
            "k": k, "trial": q, "seed": trial_seed, "disc": disc, "esup": esup,
            "r": disc / esup if esup > 0 else None,
            "lower": esup / (math.sqrt(k) * sigma_F) if sigma_F > 0 else None,
        }

    rows = ordered_map(one, jobs, threads)
    summary = []
    for k in k_list:
        rk = [r for r in rows if r["k"] == k]
        rs = [r["r"] for r in rk if r["r"] is not None]
        lows = [r["lower"] for r in rk if r["lower"] is not None]
        summary.append({
            "k": k,
            "median_r": float(np.median(rs)) if rs else None,
            "median_lower": float(np.median(lows)) if lows else None,
            "min_lower": float(min(lows)) if lows else None,
            "alpha_bound": _alpha_bound(cls, k, rho, seq, c1, c2) if sigma_F > 0 else 0.0,
            "degenerate": not rs,
        })
    return {"rho": rho, "budget": budget, "trials": trials, "constants": {"c1": c1, "c2": c2},
            "summary": summary, "rows": rows}


# -- descriptive checks -----------------------------------------------------------


def isotropy_check(measure: MeasureSpec, samples: int = 100000, directions: int = 8, seed: int = 0) -> dict:
    """Empirical E<X, x>^2 / |x|^2 for random directions x."""
    rng = trial_rng(seed, 43)
    X = measure.sample(rng, samples)
    dirs = rng.standard_normal((directions, measure.dim))
    ratios = np.mean((X @ dirs.T) ** 2, axis=0) / np.sum(dirs * dirs, axis=1)
    return {"samples": samples, "ratios": ratios.tolist(), "min": float(ratios.min()), "max": float(ratios.max())}


def psi2_tail_report(t, measure: MeasureSpec, k: int, trials: int = 2000, seed: int = 0) -> dict:
    """Pr(|sum f(X_i)| >= u sqrt(k) psi) on a u-grid with a fitted c in 2 exp(-u^2 / c). Reported only."""
    t = np.asarray(t, dtype=float)
    rng = trial_rng(seed, 47)
    psi = psi2_estimate(measure.sample(rng, 10000) @ t)
    sums = np.array([float(np.sum(measure.sample(rng, k) @ t)) for _ in range(trials)])
    grid = np.linspace(0.5, 3.0, 11)
    probs = [float(np.mean(np.abs(sums) >= u * math.sqrt(k) * psi)) for u in grid]
    fit = [u * u / math.log(2 / p) for u, p in zip(grid, probs) if 0 < p < 2]
    return {"psi2": psi, "grid": grid.tolist(), "probs": probs, "fitted_c": max(fit) if fit else None}


def bernstein_report(t, measure: MeasureSpec, k: int, trials: int = 2000, seed: int = 0) -> dict:
    """Tails of (1/k) sum f^2(X_i) - |t|^2 against the min(u^2, u) shape. Reported only."""
    t = np.asarray(t, dtype=float)
    rng = trial_rng(seed, 53)
    norm2 = float(t @ t)
    dev = np.array([abs(float(np.mean((measure.sample(rng, k) @ t) ** 2)) - norm2) for _ in range(trials)])
    grid = np.linspace(0.1, 2.0, 10)
    rows = []
    for u in grid:
        p = float(np.mean(dev >= u * max(norm2, ATOL)))
        shape = k * min(u * u, u)
        rows.append({"u": float(u), "prob": p, "shape": shape, "log_prob": math.log(p) if p > 0 else None})
    return {"k": k, "rows": rows}


__all__ = [
    "MeasureSpec", "LinearClass", "SampleWindow", "Decomposition", "sample_window", "sample_projection",
    "project_class", "psi2_estimate", "emp_sign_sup", "gauss_mean_width", "decompose",
    "verify_weak_l2_containment", "verify_shrinking", "shrink_single", "order_stats", "meanwidth_ratio",
    "almost_isometry", "truncate_split", "eval_a_n", "gap_experiment", "isotropy_check",
    "psi2_tail_report", "bernstein_report",
]
