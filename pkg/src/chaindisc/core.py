"""Shared domain types: point sets, colorings, metrics and coordinate projections.

Coordinates are 0-indexed everywhere inside the library. The CLI and the file
readers accept 1-indexed coordinate lists and convert once at the boundary.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-9


class PreconditionError(ValueError):
    """Raised when an input violates an operation's stated precondition."""


class SizeError(PreconditionError):
    """Raised when an exhaustive routine is asked to work beyond its size cap."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite ordered set of vectors in R^n, stored as an (m, n) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1) if pts.size else pts.reshape(0, 1)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array of shape (m, n)")
        if pts.shape[1] < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or infinite entries")
        object.__setattr__(self, "points", _frozen(pts))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]]) -> "PointSet":
        rows = [list(map(float, r)) for r in rows]
        if not rows:
            raise ValueError("empty point set")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("all vectors must have the same length")
        return cls(np.array(rows, dtype=float))

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.array_equal(self.points, other.points)
        )

    def __hash__(self):
        return hash((self.points.shape, self.points.tobytes()))

    def dedup(self) -> "PointSet":
        """Distinct points in order of first occurrence."""
        _, first = np.unique(self.points, axis=0, return_index=True)
        return PointSet(self.points[np.sort(first)])

    def with_origin(self) -> "PointSet":
        """The set with the zero vector prepended (and any other copy of 0 dropped)."""
        keep = np.any(self.points != 0, axis=1)
        return PointSet(np.vstack([np.zeros((1, self.n)), self.points[keep]]))

    def diameter(self, metric: "Metric | None" = None) -> float:
        metric = metric or Metric()
        if len(self) < 2:
            return 0.0
        return float(metric.pairwise(self.points).max())


@dataclass(frozen=True, eq=False)
class Coloring:
    """Vector over {-1, 0, +1}."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.ndim != 1:
            raise ValueError("coloring must be one-dimensional")
        if not np.all(np.isin(e, (-1, 0, 1))):
            raise ValueError("coloring entries must lie in {-1, 0, +1}")
        object.__setattr__(self, "entries", _frozen(e.astype(np.int8)))

    def __len__(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coloring):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries.tobytes())

    @property
    def zero_count(self) -> int:
        return int(np.count_nonzero(self.entries == 0))

    @property
    def is_full(self) -> bool:
        return self.zero_count == 0

    def tolist(self) -> list[int]:
        return [int(v) for v in self.entries]


@dataclass(frozen=True)
class IndexSet:
    """Sorted distinct 0-based coordinate indices."""

    members: tuple[int, ...]
    allow_empty: bool = False

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        if not members and not self.allow_empty:
            raise ValueError("index set is empty")
        if members and members[0] < 0:
            raise IndexError("negative coordinate index")
        object.__setattr__(self, "members", members)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(tuple(range(n)))

    @classmethod
    def from_one_based(cls, members: Iterable[int]) -> "IndexSet":
        return cls(tuple(int(i) - 1 for i in members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def check_bounds(self, n: int) -> None:
        if self.members and self.members[-1] >= n:
            raise IndexError(f"coordinate index {self.members[-1]} out of bounds for dimension {n}")

    def as_array(self) -> np.ndarray:
        return np.array(self.members, dtype=int)


@dataclass(frozen=True)
class Metric:
    """Euclidean or empirical-L2 distance, optionally restricted to coordinates ``indices``.

    The empirical kind divides the Euclidean distance by sqrt(m), where m is the
    number of coordinates in use.
    """

    kind: str = "euclidean"
    indices: IndexSet | None = field(default=None)

    def __post_init__(self):
        if self.kind not in ("euclidean", "empirical"):
            raise ValueError(f"unknown metric kind {self.kind!r}")

    def _restrict(self, x: np.ndarray) -> np.ndarray:
        if self.indices is None:
            return x
        self.indices.check_bounds(x.shape[-1])
        return x[..., self.indices.as_array()]

    def _scale(self, dim: int) -> float:
        return 1.0 / math.sqrt(dim) if self.kind == "empirical" else 1.0

    def norm(self, x) -> np.ndarray:
        x = self._restrict(np.asarray(x, dtype=float))
        return np.linalg.norm(x, axis=-1) * self._scale(x.shape[-1])

    def distance(self, x, y) -> float:
        return float(self.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))

    def pairwise(self, a, b=None) -> np.ndarray:
        a = self._restrict(np.asarray(a, dtype=float))
        b = a if b is None else self._restrict(np.asarray(b, dtype=float))
        diff = a[:, None, :] - b[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)) * self._scale(a.shape[-1])


def parse_metric(name: str, indices: Iterable[int] | None = None) -> Metric:
    """Map CLI names (``l2``, ``L2``, ``euclidean``, ``empirical``) to a Metric."""
    kinds = {"l2": "euclidean", "euclidean": "euclidean", "L2": "empirical", "empirical": "empirical"}
    if name not in kinds:
        raise ValueError(f"unknown metric {name!r}")
    idx = IndexSet.from_one_based(indices) if indices else None
    return Metric(kinds[name], idx)


def project(T: PointSet, I: IndexSet) -> PointSet:
    """Coordinate projection of every point onto the coordinates in ``I``."""
    I.check_bounds(T.n)
    return PointSet(T.points[:, I.as_array()])


def signed_sum(t, eta) -> float:
    """Compensated evaluation of sum_i eta_i t_i."""
    t = np.asarray(t, dtype=float)
    e = eta.entries if isinstance(eta, Coloring) else np.asarray(eta)
    if t.shape != e.shape:
        raise ValueError(f"length mismatch: {t.shape[0]} vs {e.shape[0]}")
    return math.fsum((t * e).tolist())


def rearrange_nonincreasing(x) -> np.ndarray:
    return np.sort(np.abs(np.asarray(x, dtype=float)))[::-1]


def weak_l2_membership(x, r: float) -> bool:
    """True iff the j-th largest |x_j| is at most r / sqrt(j) for every j."""
    xs = rearrange_nonincreasing(x)
    bound = r / np.sqrt(np.arange(1, xs.size + 1))
    return bool(np.all(xs <= bound + ATOL))


def weak_l2_radius(x) -> float:
    """Smallest r with x in r * W_m, i.e. max_j sqrt(j) * x_j^*."""
    xs = rearrange_nonincreasing(x)
    if xs.size == 0:
        return 0.0
    return float(np.max(xs * np.sqrt(np.arange(1, xs.size + 1))))


# -- ingestion / emission ---------------------------------------------------


def _parse_csv(text: str) -> list[list[float]]:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError("no rows in CSV input")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]  # header row
    out = []
    for lineno, r in enumerate(rows, 1):
        try:
            out.append([float(c) for c in r])
        except ValueError as exc:
            raise ValueError(f"malformed CSV row {lineno}: {r!r}") from exc
    return out


def loads_points(text: str, fmt: str = "csv") -> PointSet:
    if fmt == "json":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise ValueError("JSON point set must be an array of arrays")
        return PointSet.from_rows(data)
    return PointSet.from_rows(_parse_csv(text))


def read_points(path: str | Path) -> PointSet:
    path = Path(path)
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    return loads_points(path.read_text(), fmt)


def dumps_points(T: PointSet, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(T.points.tolist())
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in T.points)


def write_points(T: PointSet, path: str | Path) -> None:
    path = Path(path)
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    path.write_text(dumps_points(T, fmt))


def dumps_coloring(eta: Coloring) -> str:
    return "".join(f"{v}\n" for v in eta.tolist())


def loads_coloring(text: str) -> Coloring:
    return Coloring(np.array([int(line) for line in text.split() if line.strip()]))
