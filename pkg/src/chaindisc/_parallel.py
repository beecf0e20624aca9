"""Seed splitting and ordered parallel maps.

Every trial draws from its own stream keyed by (seed, trial index), so results do
not depend on how many workers run them or in which order they finish.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

R = TypeVar("R")

_default_threads = 1


def set_default_threads(n: int | None) -> None:
    global _default_threads
    _default_threads = max(1, int(n or 1))


def default_threads() -> int:
    return _default_threads


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def ordered_map(fn: Callable[..., R], items: Iterable, threads: int | None = None) -> list[R]:
    items = list(items)
    threads = threads or _default_threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    threads = min(threads, len(items), os.cpu_count() * 4 if os.cpu_count() else threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
