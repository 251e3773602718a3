"""Linear learners: regularized least squares and linear epsilon-SVR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils import check_array, check_consistent_length

from finsent.exceptions import NotFittedError, SingularMatrixError, ValidationError

__all__ = [
    "LinearModel",
    "SvrConfig",
    "fit_ols",
    "fit_svr",
    "svr_objective",
    "LeastSquaresRegressor",
    "LinearSVR",
]


def check_design(X, y=None):
    """Validate a feature matrix (dense or CSR) and optional targets."""
    X = check_array(X, accept_sparse="csr", dtype=np.float64)
    if y is None:
        return X
    y = check_array(y, ensure_2d=False, dtype=np.float64)
    if y.ndim != 1:
        raise ValidationError("targets must be one-dimensional")
    check_consistent_length(X, y)
    return X, y


@dataclass(eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.bias = float(self.bias)
        if not (np.all(np.isfinite(self.weights)) and np.isfinite(self.bias)):
            raise ValidationError("linear model has non-finite parameters")

    def __eq__(self, other):
        if not isinstance(other, LinearModel):
            return NotImplemented
        return self.bias == other.bias and np.array_equal(self.weights, other.weights)

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def predict(self, X) -> np.ndarray:
        X = check_design(X)
        if X.shape[1] != self.n_features:
            raise ValidationError(f"expected {self.n_features} features, got {X.shape[1]}")
        return np.asarray(X @ self.weights).ravel() + self.bias


def _with_bias(X):
    ones = np.ones((X.shape[0], 1))
    if sp.issparse(X):
        return sp.hstack([X, ones], format="csr")
    return np.hstack([X, ones])


def fit_ols(X, y, ridge: float = 1e-8) -> LinearModel:
    """Minimize ``sum (y - Xw - b)^2 + ridge * |w|^2`` (bias unpenalized).

    Tall problems solve the bias-augmented normal equations directly. Wide
    problems (more features than rows, typical for n-grams) solve the
    equivalent ``n x n`` system ``(Xc Xc' + ridge I) a = yc`` on centered
    data and set ``w = Xc' a``, which is the same minimizer.

    Raises
    ------
    SingularMatrixError
        ``ridge == 0`` and the augmented design is rank deficient.
    """
    X, y = check_design(X, y)
    if ridge < 0:
        raise ValidationError(f"ridge must be >= 0, got {ridge}")
    n, d = X.shape

    if d + 1 <= n:
        A = _with_bias(X)
        gram = A.T @ A
        gram = gram.toarray() if sp.issparse(gram) else np.asarray(gram)
        rhs = np.asarray(A.T @ y).ravel()
        if ridge == 0:
            dense = A.toarray() if sp.issparse(A) else A
            if np.linalg.matrix_rank(dense) < d + 1:
                raise SingularMatrixError("design matrix is rank deficient and ridge=0")
        gram[np.arange(d), np.arange(d)] += ridge
        theta = np.linalg.solve(gram, rhs)
        return LinearModel(theta[:d], theta[d])

    if ridge == 0:
        raise SingularMatrixError(f"{d} features plus bias exceed {n} rows and ridge=0")
    x_mean = np.asarray(X.mean(axis=0)).ravel()
    y_mean = float(y.mean())
    Xc = (X.toarray() if sp.issparse(X) else X) - x_mean
    kernel = Xc @ Xc.T
    kernel[np.arange(n), np.arange(n)] += ridge
    dual = np.linalg.solve(kernel, y - y_mean)
    w = Xc.T @ dual
    return LinearModel(w, y_mean - x_mean @ w)


@dataclass(frozen=True)
class SvrConfig:
    c: float = 1.0
    epsilon: float = 0.1
    epochs: int = 200
    rate: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError(f"c must be > 0, got {self.c}")
        if not self.epsilon >= 0:
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon}")
        if isinstance(self.epochs, bool) or not isinstance(self.epochs, int) or self.epochs < 1:
            raise ValidationError(f"epochs must be a positive integer, got {self.epochs!r}")
        if not self.rate > 0:
            raise ValidationError(f"rate must be > 0, got {self.rate}")


def svr_objective(w, b, X, y, c, epsilon) -> float:
    """``0.5 |w|^2 + c * sum max(0, |y - Xw - b| - epsilon)``."""
    resid = y - np.asarray(X @ w).ravel() - b
    return 0.5 * float(w @ w) + c * float(np.maximum(0.0, np.abs(resid) - epsilon).sum())


def _svr_path(X, y, config: SvrConfig):
    n, d = X.shape
    rng = np.random.default_rng(config.seed)
    sparse = sp.issparse(X)
    if sparse:
        X = X.tocsr()
        X.sort_indices()
        indptr, indices, data = X.indptr, X.indices, X.data
    else:
        X = np.ascontiguousarray(X)

    w = np.zeros(d)
    # start at the target mean: if every target is inside the tube, no update fires
    b = float(y.mean())
    objectives = []
    for epoch in range(config.epochs):
        eta = config.rate / (1.0 + epoch)
        shrink = 1.0 - eta / n
        # running mean, so an iterate that never moves averages to itself exactly
        w_avg, b_avg = w.copy(), b
        for k, i in enumerate(rng.permutation(n), start=1):
            if sparse:
                lo, hi = indptr[i], indptr[i + 1]
                cols, vals = indices[lo:hi], data[lo:hi]
                resid = y[i] - vals @ w[cols] - b
            else:
                resid = y[i] - X[i] @ w - b
            w *= shrink
            if abs(resid) > config.epsilon:
                step = eta * config.c * (1.0 if resid > 0 else -1.0)
                if sparse:
                    w[cols] += step * vals
                else:
                    w += step * X[i]
                b += step
            w_avg += (w - w_avg) / k
            b_avg += (b - b_avg) / k
        objectives.append(svr_objective(w_avg, b_avg, X, y, config.c, config.epsilon))
    return LinearModel(w_avg, b_avg), objectives


def fit_svr(X, y, config: SvrConfig = SvrConfig()) -> LinearModel:
    """Linear epsilon-SVR in the primal by shuffled subgradient descent.

    Minimizes ``0.5 |w|^2 + c * sum max(0, |r_i| - epsilon)``. Epoch ``e``
    uses step ``rate / (1 + e)``; rows are visited in a seeded random order
    each epoch. The returned parameters are the mean iterate of the last
    epoch.
    """
    X, y = check_design(X, y)
    return _svr_path(X, y, config)[0]


class _LinearPredictorMixin:
    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    @property
    def coef_(self) -> np.ndarray:
        self._check_fitted()
        return self.model_.weights

    @property
    def intercept_(self) -> float:
        self._check_fitted()
        return self.model_.bias

    def predict(self, X):
        self._check_fitted()
        return self.model_.predict(X)


class LeastSquaresRegressor(_LinearPredictorMixin, RegressorMixin, BaseEstimator):
    """Ordinary least squares with a tiny ridge for rank-deficient designs."""

    def __init__(self, ridge=1e-8):
        self.ridge = ridge

    def fit(self, X, y):
        self.model_ = fit_ols(X, y, self.ridge)
        self.n_features_in_ = self.model_.n_features
        return self


class LinearSVR(_LinearPredictorMixin, RegressorMixin, BaseEstimator):
    """Linear epsilon-insensitive support vector regression.

    Attributes
    ----------
    objective_history_ : list of float
        Objective at each epoch's averaged iterate.
    """

    def __init__(self, c=1.0, epsilon=0.1, epochs=200, rate=0.5, seed=0):
        self.c = c
        self.epsilon = epsilon
        self.epochs = epochs
        self.rate = rate
        self.seed = seed

    def fit(self, X, y):
        config = SvrConfig(self.c, self.epsilon, self.epochs, self.rate, self.seed)
        X, y = check_design(X, y)
        self.model_, self.objective_history_ = _svr_path(X, y, config)
        self.n_features_in_ = self.model_.n_features
        return self
