"""Seeded instance generators, addressed by short specs such as ``basis:8`` or ``intervals:64,128``.

Every generated set lists points as rows; ``n`` is always the ambient
dimension and ``m`` the number of points.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from ._parallel import trial_rng
from .core import PointSet, SizeError, read_points

CUBE_LIMIT = 12


def random_box(n: int, m: int, seed: int = 0) -> PointSet:
    """m points uniform in the cube [-1, 1]^n."""
    return PointSet(trial_rng(seed, 101).uniform(-1.0, 1.0, size=(m, n)))


def random_signs(n: int, m: int, seed: int = 0) -> PointSet:
    """m independent uniform vectors of {-1, 1}^n."""
    return PointSet(trial_rng(seed, 103).choice(np.array([-1.0, 1.0]), size=(m, n)))


def random_sphere(n: int, m: int, seed: int = 0) -> PointSet:
    """m points uniform on the unit sphere of R^n."""
    x = trial_rng(seed, 107).standard_normal((m, n))
    return PointSet(x / np.linalg.norm(x, axis=1, keepdims=True))


def basis(n: int) -> PointSet:
    return PointSet(np.eye(n))


def cube(n: int) -> PointSet:
    if n > CUBE_LIMIT:
        raise SizeError(f"cube generator supports n <= {CUBE_LIMIT}")
    return PointSet(np.array(list(itertools.product((-1.0, 1.0), repeat=n))))


def intervals(n: int, m: int, seed: int = 0) -> PointSet:
    """m indicator rows of initial segments {1..b} of n ordered points.

    Initial segments have VC dimension 1: for i < j the pattern {j} never occurs.
    The right ends b are drawn uniformly from 1..n.
    """
    ends = trial_rng(seed, 109).integers(1, n + 1, size=m)
    return PointSet((np.arange(n)[None, :] < ends[:, None]).astype(float))


def _ints(args: list[str], count: int, kind: str) -> list[int]:
    if len(args) != count:
        raise ValueError(f"{kind} expects {count} integer parameter(s), got {len(args)}")
    try:
        vals = [int(a) for a in args]
    except ValueError as exc:
        raise ValueError(f"{kind} parameters must be integers: {args}") from exc
    if any(v < 1 for v in vals):
        raise ValueError(f"{kind} parameters must be positive")
    return vals


def generate(spec: str, seed: int = 0) -> PointSet:
    """Build a point set from ``kind:params``.

    Kinds: random-box:n,m  random-signs:n,m  random-sphere:n,m  basis:n  cube:n
    intervals:n,m  csv:path.
    """
    kind, _, rest = spec.partition(":")
    if kind == "csv":
        if not rest:
            raise ValueError("csv generator needs a path")
        return read_points(Path(rest))
    args = [a for a in rest.split(",") if a] if rest else []
    if kind == "random-box":
        return random_box(*_ints(args, 2, kind), seed=seed)
    if kind == "random-signs":
        return random_signs(*_ints(args, 2, kind), seed=seed)
    if kind == "random-sphere":
        return random_sphere(*_ints(args, 2, kind), seed=seed)
    if kind == "basis":
        return basis(*_ints(args, 1, kind))
    if kind == "cube":
        return cube(*_ints(args, 1, kind))
    if kind == "intervals":
        return intervals(*_ints(args, 2, kind), seed=seed)
    raise ValueError(f"unknown generator {kind!r}")
