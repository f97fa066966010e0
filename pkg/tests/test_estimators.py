import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from cylou.criteria import Overall
from cylou.estimators import MildSolutionTransformer
from cylou.noise import DiagonalGaussian
from cylou.spectral import semigroup_apply, weyl_eigenvalues


def make(**kw):
    model = weyl_eigenvalues(1, 1.0, 3)  # 1, 4, 9
    return MildSolutionTransformer(model, DiagonalGaussian((1.0, 1.0, 1.0)), **kw)


def test_params_and_clone():
    est = make(t=0.5, random_state=3)
    params = est.get_params()
    assert params["t"] == 0.5 and params["random_state"] == 3
    twin = clone(est).set_params(t=2.0)
    assert twin.t == 2.0 and est.t == 0.5


def test_fit_sets_report():
    est = make().fit(np.zeros((2, 3)))
    assert est.n_features_in_ == 3
    assert est.overall_ is Overall.STATIONARY_EXISTS


def test_unfitted_and_shape_errors():
    with pytest.raises(NotFittedError):
        make().transform(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        make().fit(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        MildSolutionTransformer().fit()


def test_transform_zero_time_identity():
    X = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(make(t=0.0).fit().transform(X), X)


def test_transform_mean_and_determinism():
    X = np.tile([1.0, -1.0, 2.0], (20_000, 1))
    est = make(t=1.0).fit()
    out = est.transform(X)
    assert np.array_equal(out, est.transform(X))
    np.testing.assert_allclose(out.mean(axis=0), semigroup_apply(est.model, X[0], 1.0), atol=0.02)


def test_sample_variance():
    est = make(t=1.0).fit()
    x = est.sample(40_000)
    lam = np.array([1.0, 4.0, 9.0])
    np.testing.assert_allclose(x.var(axis=0), (1 - np.exp(-2 * lam)) / (2 * lam), rtol=0.05)
