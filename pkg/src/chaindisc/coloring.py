"""Discrepancy: exact enumeration, local-search heuristics, and constructive partial colorings.

Points are rows of an (m, n) array; a coloring acts on the n coordinates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import chaining
from ._parallel import trial_rng
from .core import ATOL, Coloring, PointSet, PreconditionError, SizeError, signed_sum
from .entropy_oracle import phi

DISC_EXACT_LIMIT = 24
HDISC_LIMIT = 16
PARTIAL_EXHAUSTIVE_LIMIT = 20
REMAINDER_SIZE = 10
_CHUNK = 1 << 15
_EXHAUSTIVE_BUCKET_CAP = 4096
_SAMPLED_BUCKET_CAP = 32


class PartialColoringFailure(RuntimeError):
    """No admissible pair was found; ``stats`` describes the bucket table."""

    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class DiscResult:
    value: float
    coloring: Coloring
    exact: bool
    details: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class PartialColorResult:
    coloring: Coloring
    chain_bound: float
    zero_count: int
    method: str
    budget_used: int
    certificates: np.ndarray = field(repr=False, compare=False, default=None)
    stats: dict = field(default_factory=dict, compare=False)


def sup_abs(A: np.ndarray, eta) -> float:
    """max_t |<eta, t>| over the rows of A, each sum compensated."""
    e = eta.entries if isinstance(eta, Coloring) else np.asarray(eta)
    if A.shape[0] == 0:
        return 0.0
    return max(abs(signed_sum(row, e)) for row in A)


def _signs(n: int, start: int, count: int, fixed_first: bool) -> np.ndarray:
    """Sign vectors for integers start..start+count-1; bit j of the integer flips coordinate j."""
    idx = np.arange(start, start + count, dtype=np.int64)
    if fixed_first:
        bits = (idx[:, None] >> np.arange(n - 1)) & 1
        E = np.ones((count, n), dtype=np.int8)
        E[:, 1:] = 1 - 2 * bits
        return E
    bits = (idx[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def _distinct_rows(T: PointSet) -> np.ndarray:
    A = T.dedup().points
    return A[np.any(A != 0, axis=1)]


# -- exact -------------------------------------------------------------------------


def disc_exact(T: PointSet) -> DiscResult:
    """Minimum over full sign vectors of max_t |<eps, t>|, by enumeration.

    Coordinate 1 is fixed to +1 (the objective is invariant under eps -> -eps),
    so 2^{n-1} vectors are scanned; ties go to the first in enumeration order.
    """
    n = T.n
    if n > DISC_EXACT_LIMIT:
        raise SizeError(f"disc_exact supports n <= {DISC_EXACT_LIMIT}; use disc_heuristic for n = {n}")
    A = _distinct_rows(T)
    if A.shape[0] == 0:
        return DiscResult(0.0, Coloring(np.ones(n, dtype=np.int8)), True)
    total = 1 << (n - 1)
    best, best_vec = math.inf, None
    for start in range(0, total, _CHUNK):
        E = _signs(n, start, min(_CHUNK, total - start), fixed_first=True)
        vals = np.abs(E.astype(float) @ A.T).max(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best - 1e-12:
            best, best_vec = float(vals[i]), E[i].copy()
    col = Coloring(best_vec)
    return DiscResult(sup_abs(A, col), col, True)


def hdisc_exact(T: PointSet) -> float:
    """max over nonempty coordinate sets I of disc(P_I T).

    Every eta in {-1,0,1}^n is scored once; disc(P_I T) is the minimum score over
    the eta whose support is exactly I.
    """
    n = T.n
    if n > HDISC_LIMIT:
        raise SizeError(f"hdisc_exact supports n <= {HDISC_LIMIT}")
    A = _distinct_rows(T)
    if A.shape[0] == 0:
        return 0.0
    total = 3 ** n
    per_support = np.full(1 << n, np.inf)
    pow3 = 3 ** np.arange(n, dtype=np.int64)
    weights = 1 << np.arange(n, dtype=np.int64)
    chunk = max(1, (1 << 22) // max(1, A.shape[0]))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (idx[:, None] // pow3) % 3  # 0 -> 0, 1 -> +1, 2 -> -1
        eta = np.where(digits == 2, -1, digits).astype(float)
        vals = np.abs(eta @ A.T).max(axis=1)
        support = ((digits != 0) * weights).sum(axis=1)
        np.minimum.at(per_support, support, vals)
    return float(per_support[1:].max())


# -- local search --------------------------------------------------------------------


def _local_search(
    A: np.ndarray, E: np.ndarray, offset: np.ndarray | None = None, max_rounds: int | None = None
) -> np.ndarray:
    """Single-flip descent on (max_t |S_t|, sum_t S_t^2), batched over the rows of E.

    S_t = offset_t + <e, t>. Zero entries of E stay zero. Returns the locally
    optimal sign matrix.
    """
    E = E.astype(float).copy()
    B, n = E.shape
    if A.shape[0] == 0 or n == 0:
        return E
    AT = A.T  # (n, m)
    S = E @ A.T  # (B, m)
    if offset is not None:
        S = S + offset[None, :]
    active = np.ones(B, dtype=bool)
    rounds = 0
    step = max(1, (1 << 22) // max(1, n * A.shape[0]))
    while active.any():
        rounds += 1
        if max_rounds is not None and rounds > max_rounds:
            break
        for lo in range(0, B, step):
            sl = slice(lo, min(B, lo + step))
            act = active[sl]
            if not act.any():
                continue
            Es, Ss = E[sl], S[sl]
            cur_max = np.abs(Ss).max(axis=1)
            cur_sq = (Ss * Ss).sum(axis=1)
            Sn = Ss[:, None, :] - 2.0 * Es[:, :, None] * AT[None, :, :]
            mx = np.abs(Sn).max(axis=2)
            sq = (Sn * Sn).sum(axis=2)
            mx[Es == 0] = np.inf
            best_mx = mx.min(axis=1)
            sq_m = np.where(mx <= best_mx[:, None] + 1e-12, sq, np.inf)
            j = np.argmin(sq_m, axis=1)
            r = np.arange(Es.shape[0])
            better = (best_mx < cur_max - 1e-12) | (
                (best_mx <= cur_max + 1e-12) & (sq_m[r, j] < cur_sq - 1e-9)
            )
            better &= act
            idx = np.nonzero(better)[0]
            if idx.size:
                S[sl][idx] = Sn[idx, j[idx]]
                E[sl][idx, j[idx]] *= -1.0
            active[sl] = better
    return E


def _best_row(A: np.ndarray, E: np.ndarray) -> tuple[float, np.ndarray]:
    vals = np.abs(E @ A.T).max(axis=1) if A.shape[0] else np.zeros(E.shape[0])
    i = int(np.argmin(vals))
    return float(vals[i]), E[i]


def disc_heuristic(T: PointSet, budget: int = 4096, seed: int = 0, use_spencer: bool = True) -> DiscResult:
    """Upper bound on disc(T): best of ``budget`` random restarts polished by local search,
    plus the iterated-halving coloring (also polished)."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    n = T.n
    A = _distinct_rows(T)
    if A.shape[0] == 0:
        return DiscResult(0.0, Coloring(np.ones(n, dtype=np.int8)), False, {"source": "trivial"})
    rng = trial_rng(seed, 0)
    E = rng.choice(np.array([-1.0, 1.0]), size=(budget, n))
    E = _local_search(A, E)
    best, vec = _best_row(A, E)
    source = "restarts"
    details: dict = {"restarts": budget}
    if use_spencer:
        sp = spencer_color(T, seed=seed, warn=False)
        polished = _local_search(A, sp.coloring.entries[None, :].astype(float))[0]
        val = float(np.abs(A @ polished).max())
        details["spencer_value"] = sp.value
        if val < best - 1e-12:
            best, vec, source = val, polished, "spencer"
    col = Coloring(vec.astype(np.int8))
    details["source"] = source
    return DiscResult(sup_abs(A, col), col, False, details)


# -- partial coloring via the pigeonhole ----------------------------------------------


@dataclass
class _Chain:
    """Distinct chain links with their scales and, per point, the links it uses."""

    directions: np.ndarray  # (L, n) rows u / (|u| Q_s)
    uses: list  # per point: list of (link index)
    certificates: np.ndarray  # per point: sum_s Q_s |Delta_s(t)|
    point_index: np.ndarray  # source row -> sequence point index


def _chain(T: PointSet, sched: chaining.Schedule, seq: chaining.AdmissibleSequence) -> _Chain:
    P = seq.points.points
    dirs, cert = [], np.zeros(len(seq.points))
    uses: list = [[] for _ in range(len(seq.points))]
    for s in range(1, seq.s_max + 1):
        links = seq.link(s)
        norms = np.linalg.norm(links, axis=1)
        q = sched.q(s)
        cert += q * norms
        nz = norms > 0
        if not nz.any():
            continue
        uniq, inv = np.unique(links[nz], axis=0, return_inverse=True)
        inv = np.asarray(inv).ravel()
        base = len(dirs)
        for u in uniq:
            dirs.append(u / (np.linalg.norm(u) * q))
        for pt, k in zip(np.nonzero(nz)[0], inv):
            uses[pt].append(base + int(k))
    D = np.array(dirs) if dirs else np.zeros((0, T.n))
    # map source rows to sequence points
    lookup = {row.tobytes(): i for i, row in enumerate(P)}
    pidx = np.array([lookup[row.tobytes()] for row in T.points], dtype=int)
    return _Chain(D, uses, cert, pidx)


def _fingerprints(E: np.ndarray, D: np.ndarray) -> np.ndarray:
    z = E.astype(float) @ D.T
    return (np.sign(z) * np.floor(np.abs(z))).astype(np.int64)


def _window(n: int, h: np.ndarray) -> np.ndarray:
    # n/4 <= h <= 3n/4 differing coordinates, i.e. the same window on the zero count
    return (4 * h >= n) & (4 * h <= 3 * n)


class _Buckets:
    def __init__(self, n: int, cap: int):
        self.n, self.cap = n, cap
        self.table: dict = {}
        self.seen = 0

    def offer(self, key: bytes, eps: np.ndarray):
        self.seen += 1
        stored = self.table.get(key)
        if stored is None:
            self.table[key] = [eps]
            return None
        M = np.array(stored)
        h = np.count_nonzero(M != eps[None, :], axis=1)
        ok = np.nonzero(_window(self.n, h))[0]
        if ok.size:
            return stored[int(ok[0])]
        if len(stored) < self.cap:
            stored.append(eps)
        return None

    def stats(self) -> dict:
        sizes = [len(v) for v in self.table.values()]
        return {
            "vectors_seen": self.seen,
            "buckets": len(self.table),
            "largest_bucket": max(sizes) if sizes else 0,
        }


def _scan(n: int, D: np.ndarray, batches, cap: int):
    buckets = _Buckets(n, cap)
    for E in batches:
        if D.shape[0]:
            F = np.ascontiguousarray(_fingerprints(E, D))
            keys = [F[i].tobytes() for i in range(F.shape[0])]
        else:
            keys = [b""] * E.shape[0]
        for i in range(E.shape[0]):
            mate = buckets.offer(keys[i], E[i])
            if mate is not None:
                return E[i], mate, buckets
    return None, None, buckets


def partial_color(
    T: PointSet,
    sched: chaining.Schedule | None = None,
    seq: chaining.AdmissibleSequence | None = None,
    budget: int = 100_000,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> PartialColorResult:
    """Partial coloring with n/4 <= #zeros <= 3n/4 and a chaining certificate.

    Random sign vectors are bucketed by the quantized value of every chain link
    u (at level s) evaluated as Z_u / (|u| Q_s). Two vectors eps, eps' in one
    bucket that differ on n/4..3n/4 coordinates give eta = (eps - eps')/2, and then
    |<eta, t>| <= sum_s Q_s |pi_s(t) - pi_{s-1}(t)| for every t.

    The chain starts at the origin: when ``seq`` is None it is built greedily on
    T ∪ {0} rooted at 0. When sampling fails and n <= 20 every sign vector is
    scanned, which settles existence for that instance.
    """
    n = T.n
    sched = sched or chaining.schedule_gamma(n)
    if seq is None:
        seq = chaining.build_admissible(T.with_origin(), root=0)
    root_pt = seq.points.points[seq.levels[0][0]]
    if np.any(root_pt != 0):
        raise ValueError("the admissible sequence must be rooted at the origin")
    chain = _chain(T, sched, seq)
    rng = trial_rng(seed, 1)

    def sampled():
        drawn = 0
        while drawn < budget:
            b = min(4096, budget - drawn)
            drawn += b
            yield rng.choice(np.array([-1, 1], dtype=np.int8), size=(b, n))

    eps, mate, buckets = _scan(n, chain.directions, sampled(), _SAMPLED_BUCKET_CAP)
    method, used = "pigeonhole", buckets.seen
    stats = {"sampling": buckets.stats()}
    if eps is None:
        if exhaustive is None:
            exhaustive = n <= PARTIAL_EXHAUSTIVE_LIMIT
        if exhaustive:
            if n > PARTIAL_EXHAUSTIVE_LIMIT:
                raise SizeError(f"exhaustive partial coloring supports n <= {PARTIAL_EXHAUSTIVE_LIMIT}")
            total = 1 << n
            full = (_signs(n, s, min(_CHUNK, total - s), False) for s in range(0, total, _CHUNK))
            eps, mate, ex = _scan(n, chain.directions, full, _EXHAUSTIVE_BUCKET_CAP)
            stats["exhaustive"] = ex.stats()
            method, used = "exhaustive", used + ex.seen
        if eps is None:
            stats["exists"] = False if exhaustive else None
            raise PartialColoringFailure(
                f"no bucket pair within the window after {used} sign vectors", stats
            )
    eta = ((eps.astype(np.int16) - mate.astype(np.int16)) // 2).astype(np.int8)
    col = Coloring(eta)
    certs = chain.certificates[chain.point_index]
    return PartialColorResult(
        coloring=col,
        chain_bound=float(certs.max()) if certs.size else 0.0,
        zero_count=col.zero_count,
        method=method,
        budget_used=used,
        certificates=certs,
        stats=stats,
    )


def verify_partial(T: PointSet, res: PartialColorResult, tol: float = ATOL) -> bool:
    """Re-check the zero window and every pointwise certificate."""
    n = T.n
    z = res.coloring.zero_count
    if not (4 * z >= n and 4 * z <= 3 * n):
        return False
    return all(
        abs(signed_sum(t, res.coloring)) <= c + tol for t, c in zip(T.points, res.certificates)
    )


def entropy_budget_check(sched: chaining.Schedule, n: int, s_max: int = 64) -> dict:
    """Evaluate k1 * sum_s lambda_s Phi((k2 Q_s)^2) against n/100."""
    k1, k2 = sched.constants.get("k1", 1.0), sched.constants.get("k2", 1.0)
    last = sched.length or s_max
    total = 0.0
    for s in range(1, last + 1):
        x = (k2 * sched.q(s)) ** 2
        ll = sched.log_lam(s)
        if x > 1:
            log_phi = math.log(x) + 1.0 - x
            log_term = ll + log_phi
            term = math.exp(log_term) if log_term < 700 else math.inf
        else:
            term = math.exp(ll) * phi(x) if ll < 700 else math.inf
        total += term
        if sched.length is None and s > 3 and term < 1e-300:
            break
    lhs = k1 * total
    rhs = n / 100.0
    return {"passes": lhs <= rhs, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs else math.inf}


# -- iterated halving ------------------------------------------------------------------


def _local_partial(A: np.ndarray, offset: np.ndarray, rng: np.random.Generator, restarts: int = 4) -> np.ndarray:
    """Partial coloring with ceil(n/4) zeros found by local search on offset + <eta, t>.

    A polished full coloring is computed first; then coordinates are zeroed one at
    a time, each time the one whose removal leaves the smallest sup, and the
    remaining signs are polished again.
    """
    n = A.shape[1]
    zeros = math.ceil(n / 4)
    if A.shape[0] == 0:
        eta = np.ones(n)
        eta[:zeros] = 0.0
        return eta
    E = _local_search(A, rng.choice(np.array([-1.0, 1.0]), size=(restarts, n)), offset)
    vals = np.abs(E @ A.T + offset[None, :]).max(axis=1)
    eta = E[int(np.argmin(vals))].copy()
    S = offset + A @ eta
    for _ in range(zeros):
        nz = np.nonzero(eta)[0]
        cand = S[:, None] - A[:, nz] * eta[nz][None, :]
        j = nz[int(np.argmin(np.abs(cand).max(axis=0)))]
        S = S - A[:, j] * eta[j]
        eta[j] = 0.0
    return _local_search(A, eta[None, :], offset)[0]


def _exact_with_offset(A: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Full signs on at most a few coordinates minimising max_t |offset_t + <eps, t>|."""
    r = A.shape[1]
    if A.shape[0] == 0:
        return np.ones(r)
    E = _signs(r, 0, 1 << r, fixed_first=False).astype(float)
    vals = np.abs(E @ A.T + offset[None, :]).max(axis=1)
    return E[int(np.argmin(vals))]


def _halving(T: PointSet, seed: int, round_fn, label: str) -> DiscResult:
    """Color coordinates round by round until at most 10 remain, then finish exactly.

    A round that cannot be certified by ``round_fn`` falls back to local search;
    fallback rounds and the final remainder minimise the running sums, so the
    stitched value never exceeds the sum of per-round sups.
    """
    A_full = _distinct_rows(T)
    n = T.n
    eta = np.zeros(n)
    remaining = np.arange(n)
    rounds = []
    r = 0
    rng = trial_rng(seed, 7)
    while remaining.size > REMAINDER_SIZE:
        P = PointSet(T.points[:, remaining])
        A = A_full[:, remaining]
        flagged = False
        try:
            res = round_fn(P, r)
            part = res.coloring.entries.astype(float)
            bound, method = res.chain_bound, res.method
        except PartialColoringFailure:
            part = _local_partial(A, A_full @ eta, rng)
            bound, method, flagged = None, "local-fallback", True
        achieved = float(np.abs(A @ part).max()) if A.shape[0] else 0.0
        if bound is None:
            bound = achieved
        rounds.append(
            {"round": r, "size": int(remaining.size), "colored": int(np.count_nonzero(part)),
             "method": method, "bound": float(bound), "achieved": achieved, "fallback": flagged}
        )
        eta[remaining[part != 0]] = part[part != 0]
        remaining = remaining[part == 0]
        r += 1
    tail = 0.0
    if remaining.size:
        A = A_full[:, remaining]
        rest = _exact_with_offset(A, A_full @ eta)
        eta[remaining] = rest
        tail = float(np.abs(A @ rest).max()) if A.shape[0] else 0.0
    col = Coloring(eta.astype(np.int8))
    value = sup_abs(A_full, col)
    details = {
        "rounds": rounds,
        "remainder_size": int(remaining.size),
        "remainder_value": tail,
        "stitched_bound": float(sum(x["bound"] for x in rounds) + tail),
        "fallback_rounds": sum(x["fallback"] for x in rounds),
        "driver": label,
    }
    return DiscResult(value, col, False, details)


def spencer_color(
    T: PointSet,
    seed: int = 0,
    budget: int = 4096,
    kappa: dict | None = None,
    warn: bool = True,
) -> DiscResult:
    """Full coloring by repeated partial coloring of the still-uncolored coordinates.

    Each round runs ``partial_color`` on the projection onto the zero coordinates of
    the previous rounds; a failed round falls back to a local-search partial coloring
    (flagged in ``details``). At most 10 coordinates are finally colored exactly.
    """
    if warn and np.abs(T.points).max(initial=0.0) > 1 + ATOL:
        warnings.warn("spencer_color expects points in the unit cube ball B_inf^n", stacklevel=2)

    def round_fn(P: PointSet, r: int) -> PartialColorResult:
        sched = chaining.schedule_gamma(P.n, kappa) if P.n >= 4 else None
        small = P.n <= PARTIAL_EXHAUSTIVE_LIMIT and len(P) * (1 << P.n) <= (1 << 24)
        return partial_color(P, sched, budget=budget, seed=seed * 1000 + r, exhaustive=small)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return _halving(T, seed, round_fn, "spencer")


def matousek_color(T: PointSet, d: int, seed: int = 0, budget: int = 4096, validate: bool = True) -> DiscResult:
    """Iterated halving for {0,1}-systems of VC dimension at most ``d``.

    Each round uses the two-branch entropy schedule and the top-down separated-net
    sequence built on the projection. The result reports value / n^{1/2 - 1/(2d)}.
    """
    A = T.points
    if not np.all(np.isin(A, (0.0, 1.0))):
        raise PreconditionError("matousek_color expects a {0,1}-valued system")
    if d < 1:
        raise ValueError("d must be at least 1")
    checked = None
    if validate and T.n <= 12 and len(T) <= 4096:
        from .shatter import classical_vc

        checked = classical_vc(T)
        if checked > d:
            raise PreconditionError(f"declared VC bound {d} is below the measured VC dimension {checked}")

    def round_fn(P: PointSet, r: int) -> PartialColorResult:
        sched = chaining.schedule_entropy(P.n)
        seq = chaining.build_entropy_sequence(P.with_origin(), sched, root=0)
        small = P.n <= PARTIAL_EXHAUSTIVE_LIMIT and len(P) * (1 << P.n) <= (1 << 24)
        return partial_color(P, sched, seq, budget=budget, seed=seed * 1000 + r, exhaustive=small)

    res = _halving(T, seed, round_fn, "matousek")
    scale = T.n ** (0.5 - 0.5 / d)
    res.details.update({"d": d, "measured_vc": checked, "scale": scale, "ratio": res.value / scale})
    return res
