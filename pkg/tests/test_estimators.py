import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from chaindisc.estimators import (
    AdmissibleChain,
    CoordinateProjection,
    DiscrepancyMinimizer,
    PartialColorer,
    Truncator,
)

ALL = [DiscrepancyMinimizer, PartialColorer, AdmissibleChain, CoordinateProjection, Truncator]


@pytest.mark.parametrize("cls", ALL)
def test_params_round_trip_and_clone(cls):
    est = cls()
    params = est.get_params()
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(**params)


@pytest.mark.parametrize("cls", ALL)
def test_transform_before_fit_raises(cls):
    with pytest.raises(NotFittedError):
        cls().transform(np.eye(3))


def test_discrepancy_minimizer_exact():
    X = np.eye(6)
    est = DiscrepancyMinimizer(mode="exact").fit(X)
    assert est.disc_ == 1 and est.exact_
    assert est.transform(X).shape == (6, 1)
    assert est.score(X) == -1.0
    with pytest.raises(ValueError):
        est.transform(np.eye(5))
    with pytest.raises(ValueError):
        DiscrepancyMinimizer(mode="magic").fit(X)


def test_discrepancy_minimizer_rejects_nan():
    X = np.eye(3)
    X[0, 0] = np.nan
    with pytest.raises(ValueError):
        DiscrepancyMinimizer().fit(X)


def test_partial_colorer_certified():
    X = np.eye(16)
    est = PartialColorer().fit(X)
    assert 4 <= est.zero_count_ <= 12
    assert np.all(np.abs(est.transform(X)) <= est.chain_bound_ + 1e-9)
    ent = PartialColorer(schedule="entropy").fit(X)
    assert 4 <= ent.zero_count_ <= 12


def test_admissible_chain_levels():
    X = np.array([[0.0, 0.0], [3.0, 4.0]])
    est = AdmissibleChain(strategy="exhaustive").fit(X)
    assert est.gamma2_ == pytest.approx(5.0)
    top = AdmissibleChain(level=5).fit(X)
    assert np.array_equal(top.transform(X), X)
    coarse = est.transform(X)
    assert len({tuple(r) for r in coarse}) == 1


def test_projection_and_truncator_pipeline():
    X = np.eye(4)
    pipe = make_pipeline(CoordinateProjection(k=32, measure="cube", seed=1), Truncator(beta=0.5))
    Z = pipe.fit_transform(X)
    assert Z.shape == (4, 32) and np.abs(Z).max() == 0.5
    proj = pipe.steps[0][1]
    assert np.array_equal(proj.transform(X), proj.sigma_.T)
    tr = Truncator(beta=1.0).fit(X)
    V = np.array([[0.5, -2.0]])
    assert tr.residual(V).tolist() == [[0.0, -1.0]]
    with pytest.raises(ValueError):
        Truncator(beta=0).fit(X)


def test_projection_seed_reproducible():
    X = np.ones((2, 3))
    a = CoordinateProjection(k=8, seed=4).fit(X).sigma_
    b = CoordinateProjection(k=8, seed=4).fit(X).sigma_
    assert np.array_equal(a, b)
    norms = np.linalg.norm(CoordinateProjection(k=4000).fit(np.eye(3)).transform(np.eye(3)), axis=1)
    assert np.allclose(norms / math.sqrt(4000), 1, atol=0.05)
