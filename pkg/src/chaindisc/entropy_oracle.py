"""Exact laws behind the entropy method.

The distribution of Z_a = sum_i eps_i a_i under uniform random signs is computed
by repeated convolution, either in floating point or in dyadic rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import SizeError

MAX_LAW_LENGTH = 24
MAX_EXACT_LENGTH = 16
_MERGE_TOL = 1e-12


def phi(t: float) -> float:
    """log(e/t) on (0, 1] and t*exp(1-t) beyond; +inf input gives the limit 0."""
    if not t > 0:
        raise ValueError(f"phi is defined for t > 0, got {t}")
    if math.isinf(t):
        return 0.0
    if t <= 1:
        return 1.0 - math.log(t)
    return t * math.exp(1.0 - t)


@dataclass(frozen=True)
class SignedSumLaw:
    """Probability mass function of Z_a, sorted by value."""

    values: tuple
    probs: tuple

    def __iter__(self):
        return iter(zip(self.values, self.probs))

    def __len__(self):
        return len(self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.values, self.probs))

    def total(self):
        return sum(self.probs)


def _check_length(a: Sequence) -> None:
    if len(a) > MAX_LAW_LENGTH:
        raise SizeError(f"signed_sum_law supports at most {MAX_LAW_LENGTH} coordinates, got {len(a)}")


def signed_sum_law(a: Iterable[float], exact: bool = False) -> SignedSumLaw:
    """Exact law of Z_a.

    With ``exact=True`` values and probabilities are Fractions (probabilities are
    dyadic with denominator 2^n); only available for n <= 16.
    """
    a = list(a)
    _check_length(a)
    if exact:
        if len(a) > MAX_EXACT_LENGTH:
            raise SizeError(f"exact mode supports at most {MAX_EXACT_LENGTH} coordinates")
        law = {Fraction(0): Fraction(1)}
        half = Fraction(1, 2)
        for ai in map(Fraction, a):
            nxt: dict = {}
            for v, p in law.items():
                for w in (v + ai, v - ai):
                    nxt[w] = nxt.get(w, 0) + p * half
            law = nxt
        vals = sorted(law)
        return SignedSumLaw(tuple(vals), tuple(law[v] for v in vals))

    vals = np.zeros(1)
    probs = np.ones(1)
    for ai in a:
        v = np.concatenate([vals + ai, vals - ai])
        p = np.concatenate([probs, probs]) * 0.5
        vals, probs = _merge(v, p)
    return SignedSumLaw(tuple(vals.tolist()), tuple(probs.tolist()))


def _merge(v: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(v, kind="stable")
    v, p = v[order], p[order]
    # values within the merge tolerance of the previous group's anchor collapse together
    new_group = np.empty(v.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = np.diff(v) > _MERGE_TOL
    gid = np.cumsum(new_group) - 1
    out_p = np.bincount(gid, weights=p)
    out_v = v[new_group]
    return out_v, out_p


def quantize(z):
    """sgn(z) * floor(|z|), elementwise."""
    z = np.asarray(z, dtype=float)
    return (np.sign(z) * np.floor(np.abs(z))).astype(np.int64)


def _entropy(probs, base: str) -> float:
    p = np.asarray([float(x) for x in probs if x > 0])
    h = float(-(p * np.log(p)).sum())
    if base in ("two", "2", "bits"):
        return h / math.log(2)
    if base not in ("natural", "nat", "e"):
        raise ValueError(f"unknown entropy base {base!r}")
    return h


def _all_sums(a: np.ndarray) -> np.ndarray:
    sums = np.zeros(1)
    for ai in a:
        sums = np.concatenate([sums + ai, sums - ai])
    return sums


def w_law(a: Iterable[float], exact: bool = False) -> dict:
    """Law of W_a = sgn(Z_a) * floor(|Z_a|) as {integer: probability}."""
    a = list(a)
    if exact:
        out: dict = {}
        for v, p in signed_sum_law(a, exact=True):
            w = int(math.copysign(math.floor(abs(v)), v)) if v != 0 else 0
            out[w] = out.get(w, 0) + p
        return out
    _check_length(a)
    # enumerate all 2^n sums as an outer sum of the two halves' sums
    arr = np.asarray(a, dtype=float)
    left, right = _all_sums(arr[: arr.size // 2]), _all_sums(arr[arr.size // 2 :])
    counts: dict = {}
    chunk = max(1, (1 << 20) // right.size)
    for start in range(0, left.size, chunk):
        w = quantize(left[start : start + chunk, None] + right[None, :]).ravel()
        vals, cnt = np.unique(w, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] = counts.get(v, 0) + c
    total = float(left.size * right.size)
    return {v: c / total for v, c in sorted(counts.items())}


def w_entropy(a: Iterable[float], base: str = "natural", exact: bool = False) -> float:
    return max(0.0, _entropy(w_law(a, exact=exact).values(), base))


def entropic_ratio(a: Iterable[float], base: str = "natural") -> dict:
    """H(W_a), Phi(1/(2|a|^2)) and their ratio; the ratio is None for a = 0."""
    a = np.asarray(list(a), dtype=float)
    h = w_entropy(a, base)
    sq = float(a @ a)
    if sq == 0:
        return {"H": h, "Phi": 0.0, "ratio": None}
    ph = phi(1.0 / (2.0 * sq))
    if h == 0.0:
        return {"H": h, "Phi": ph, "ratio": 0.0}
    return {"H": h, "Phi": ph, "ratio": h / ph}


def verify_entropic_estimate(grid: Iterable[Iterable[float]], base: str = "natural", threads: int | None = None) -> dict:
    """Maximum of H(W_a) / Phi(1/(2|a|^2)) over ``grid`` and the maximizing vector.

    Degenerate vectors (a = 0) are counted but never divided by.
    """
    from ._parallel import ordered_map

    grid = [np.asarray(list(a), dtype=float) for a in grid]
    rows = ordered_map(lambda a: entropic_ratio(a, base), grid, threads)
    best, arg = None, None
    for a, r in zip(grid, rows):
        if r["ratio"] is not None and (best is None or r["ratio"] > best):
            best, arg = r["ratio"], a
    return {
        "max_ratio": best,
        "argmax": None if arg is None else arg.tolist(),
        "count": len(grid),
        "degenerate": sum(r["ratio"] is None for r in rows),
        "base": base,
        "rows": rows,
    }
