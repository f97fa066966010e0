"""scikit-learn style wrapper around the transition semigroup.

``fit`` runs the existence criteria; ``transform`` pushes each row (a
coefficient vector) forward by time ``t`` with one noise draw per row;
``sample`` draws from the time-``t`` law started at zero.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .criteria import full_report
from .noise import RngState
from .simulate import SimConfig, simulate_ensemble


class MildSolutionTransformer(TransformerMixin, BaseEstimator):
    """Evolve coefficient vectors under the truncated OU dynamics.

    Parameters
    ----------
    model : SpectralModel
    noise : noise specification matching ``model``
    t : float
        Time horizon applied by ``transform``.
    dt : float or None
        Step for non-exact schemes, default ``min(0.01, t)``.
    random_state : int
        Philox key; ``transform`` uses stream 1, ``sample`` stream 2.
    """

    def __init__(self, model=None, noise=None, t=1.0, dt=None, random_state=0):
        self.model = model
        self.noise = noise
        self.t = t
        self.dt = dt
        self.random_state = random_state

    def fit(self, X=None, y=None):
        if self.model is None or self.noise is None:
            raise ValueError("model and noise must be set before fit")
        if X is not None:
            X = check_array(X)
            if X.shape[1] != self.model.n_modes:
                raise ValueError(f"X has {X.shape[1]} columns, model has {self.model.n_modes} modes")
        self.n_features_in_ = self.model.n_modes
        self.report_ = full_report(self.model, self.noise)
        self.overall_ = self.report_.overall
        return self

    def _config(self, n, stream, y0):
        dt = self.dt if self.dt is not None else min(0.01, self.t)
        return SimConfig(n, self.t, dt, [self.t], RngState(int(self.random_state), stream), y0, workers=1)

    def transform(self, X):
        check_is_fitted(self, "report_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        if self.t == 0:
            return X.copy()
        ens = simulate_ensemble(self.model, self.noise, self._config(X.shape[0], 1, X))
        return ens.states[-1]

    def sample(self, n_samples: int) -> np.ndarray:
        """Draws from the law of the stochastic convolution at time ``t``."""
        check_is_fitted(self, "report_")
        ens = simulate_ensemble(self.model, self.noise, self._config(n_samples, 2, None))
        return ens.states[-1]
