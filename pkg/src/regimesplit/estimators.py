"""scikit-learn style wrappers around the one- and multi-dimensional splitters."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .density import EmpiricalDist
from .exceptions import DegenerateRegime
from .multidim import _fix_sign, jacobi_eigh
from .splitcore import solve_empirical


class TwoRegimeSplitter(TransformerMixin, BaseEstimator):
    """Least-squares two-level step fit to a one-dimensional sample.

    ``fit`` finds the exact empirical optimum.  ``transform`` returns the
    regime label (0 below the threshold, 1 above) and ``predict`` the fitted
    level.

    Parameters
    ----------
    tie : {"first", "last"}
        Which threshold to keep when several are tied.
    """

    def __init__(self, tie: str = "first"):
        self.tie = tie

    def _column(self, X):
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"expected a single feature, got {X.shape[1]}")
            X = X[:, 0]
        return X

    def fit(self, X, y=None, sample_weight=None):
        if self.tie not in ("first", "last"):
            raise ValueError("tie must be 'first' or 'last'")
        x = self._column(X)
        res = solve_empirical(EmpiricalDist.from_samples(x, sample_weight))
        self.result_ = res
        self.thresholds_ = np.asarray(res.thresholds)
        self.threshold_ = float(res.thresholds[0 if self.tie == "first" else -1])
        lo = x <= self.threshold_
        w = np.ones_like(x) if sample_weight is None else np.asarray(sample_weight, float)
        self.alpha_ = float(np.average(x[lo], weights=w[lo]))
        self.beta_ = float(np.average(x[~lo], weights=w[~lo]))
        self.objective_ = res.objective
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "threshold_")
        return (self._column(X) > self.threshold_).astype(int).reshape(-1, 1)

    def predict(self, X):
        check_is_fitted(self, "threshold_")
        return np.where(self._column(X) > self.threshold_, self.beta_, self.alpha_)

    def score(self, X, y=None):
        """Negative mean squared error of the step fit on ``X``."""
        x = self._column(X)
        return -float(np.mean((x - self.predict(x)) ** 2))


class HalfspaceSplitter(TransformerMixin, BaseEstimator):
    """Halfspace two-regime fit for elliptically distributed samples.

    The normal is the top eigenvector of the sample covariance and the cut
    passes through the sample mean, which is optimal for elliptical laws.
    Levels are the sample means on each side.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=float, ensure_min_samples=2)
        self.mean_ = X.mean(axis=0)
        cov = np.atleast_2d(np.cov(X, rowvar=False))
        vals, vecs = jacobi_eigh(cov)
        self.eigenvalues_ = vals
        self.direction_ = _fix_sign(vecs[:, -1])
        side = (X - self.mean_) @ self.direction_ > 0
        if side.all() or not side.any():
            raise DegenerateRegime("all samples fall on one side of the cut")
        self.alpha_ = X[~side].mean(axis=0)
        self.beta_ = X[side].mean(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "direction_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) @ self.direction_

    def transform(self, X):
        return (self.decision_function(X) > 0).astype(int).reshape(-1, 1)

    def predict(self, X):
        side = self.decision_function(X) > 0
        return np.where(side[:, None], self.beta_, self.alpha_)
