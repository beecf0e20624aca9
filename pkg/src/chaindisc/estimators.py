"""scikit-learn style wrappers around the functional API.

Inputs follow the library convention: X has one point per row, so a coloring
acts on the columns (features) of X. Hyperparameters are stored verbatim in
``__init__`` and fitted state carries a trailing underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import chaining, coloring
from ._parallel import trial_rng
from .core import Metric, PointSet
from .lab import MeasureSpec


def _points(X) -> PointSet:
    return PointSet(check_array(X, dtype=float, ensure_all_finite=True))


def _check_width(X: np.ndarray, n: int) -> None:
    if X.shape[1] != n:
        raise ValueError(f"X has {X.shape[1]} features, the estimator was fitted with {n}")


class DiscrepancyMinimizer(TransformerMixin, BaseEstimator):
    """Finds a sign vector over the features with small sup_rows |<eps, x>|.

    ``mode`` is ``exact`` (n <= 24), ``heuristic`` or ``spencer``.
    """

    def __init__(self, mode: str = "heuristic", budget: int = 4096, seed: int = 0):
        self.mode = mode
        self.budget = budget
        self.seed = seed

    def fit(self, X, y=None):
        T = _points(X)
        if self.mode == "exact":
            res = coloring.disc_exact(T)
        elif self.mode == "heuristic":
            res = coloring.disc_heuristic(T, budget=self.budget, seed=self.seed)
        elif self.mode == "spencer":
            res = coloring.spencer_color(T, seed=self.seed, budget=self.budget)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        self.coloring_ = res.coloring.entries.copy()
        self.disc_ = res.value
        self.exact_ = res.exact
        self.n_features_in_ = T.n
        return self

    def transform(self, X):
        """Signed sums <eps, x> for every row, as a column."""
        check_is_fitted(self, "coloring_")
        X = check_array(X, dtype=float)
        _check_width(X, self.n_features_in_)
        return (X @ self.coloring_.astype(float))[:, None]

    def score(self, X, y=None):
        return -float(np.abs(self.transform(X)).max())


class PartialColorer(TransformerMixin, BaseEstimator):
    """Pigeonhole partial coloring with the certified chain bound."""

    def __init__(self, schedule: str = "gamma", budget: int = 100000, seed: int = 0):
        self.schedule = schedule
        self.budget = budget
        self.seed = seed

    def fit(self, X, y=None):
        T = _points(X)
        if self.schedule == "gamma":
            sched, seq = chaining.schedule_gamma(T.n), None
        elif self.schedule == "entropy":
            sched = chaining.schedule_entropy(T.n)
            seq = chaining.build_entropy_sequence(T.with_origin(), sched, root=0)
        else:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        res = coloring.partial_color(T, sched, seq, budget=self.budget, seed=self.seed)
        self.coloring_ = res.coloring.entries.copy()
        self.chain_bound_ = res.chain_bound
        self.zero_count_ = res.zero_count
        self.method_ = res.method
        self.n_features_in_ = T.n
        return self

    def transform(self, X):
        check_is_fitted(self, "coloring_")
        X = check_array(X, dtype=float)
        _check_width(X, self.n_features_in_)
        return (X @ self.coloring_.astype(float))[:, None]


class AdmissibleChain(TransformerMixin, BaseEstimator):
    """Admissible sequence over the fitted rows; ``transform`` maps points to their level-``level`` approximant."""

    def __init__(self, strategy: str = "greedy", s0: int = 0, level: int = 0, metric: str = "euclidean"):
        self.strategy = strategy
        self.s0 = s0
        self.level = level
        self.metric = metric

    def fit(self, X, y=None):
        T = _points(X)
        metric = Metric(self.metric)
        self.sequence_ = chaining.build_admissible(T, metric, strategy=self.strategy, s0=self.s0)
        self.gamma2_ = chaining.gamma2(T, metric, s0=self.s0, seq=self.sequence_)
        self.n_features_in_ = T.n
        return self

    def transform(self, X):
        check_is_fitted(self, "sequence_")
        X = check_array(X, dtype=float)
        _check_width(X, self.n_features_in_)
        seq = self.sequence_
        s = min(self.level, seq.s_max)
        net = seq.points.points[list(seq.levels[s])]
        idx = Metric(self.metric).pairwise(X, net).argmin(axis=1)
        return net[idx]


class CoordinateProjection(TransformerMixin, BaseEstimator):
    """Samples sigma = (X_1..X_k) from an isotropic measure; rows t map to (<t, X_i>)_i."""

    def __init__(self, k: int = 64, measure: str = "gaussian", seed: int = 0):
        self.k = k
        self.measure = measure
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        spec = MeasureSpec(self.measure, X.shape[1])
        self.sigma_ = spec.sample(trial_rng(self.seed, 0), self.k)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "sigma_")
        X = check_array(X, dtype=float)
        _check_width(X, self.n_features_in_)
        return X @ self.sigma_.T


class Truncator(TransformerMixin, BaseEstimator):
    """Coordinatewise clamp to [-beta, beta]; ``residual`` returns the excess."""

    def __init__(self, beta: float = 1.0):
        self.beta = beta

    def fit(self, X, y=None):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        self.n_features_in_ = check_array(X, dtype=float).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        return np.clip(X, -self.beta, self.beta)

    def residual(self, X):
        X = check_array(X, dtype=float)
        return X - self.transform(X)
