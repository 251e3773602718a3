"""Gradient-boosted regression trees for squared error.

With squared error the gradient is the negative residual and every hessian
is 1, so a leaf holding residuals ``r`` gets value ``sum(r) / (n + lambda)``
and a split scores

    gain = GL^2 / (nL + lambda) + GR^2 / (nR + lambda) - G^2 / (n + lambda)

Splits are found by exact greedy search over every distinct value of every
feature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, RegressorMixin

from finsent.exceptions import NotFittedError, ValidationError
from finsent.regress.linear import check_design

__all__ = ["GbmConfig", "RegressionTree", "GbmModel", "fit_gbm", "BoostedTreesRegressor"]

LEAF = -1


@dataclass(frozen=True)
class GbmConfig:
    rounds: int = 100
    alpha: float = 0.3
    reg_lambda: float = 1.0
    max_depth: int = 3
    min_samples_leaf: int = 1

    def __post_init__(self):
        for name in ("rounds", "max_depth", "min_samples_leaf"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"alpha must be in (0, 1], got {self.alpha}")
        if not self.reg_lambda >= 0:
            raise ValidationError(f"lambda must be >= 0, got {self.reg_lambda}")


@dataclass(eq=False)
class RegressionTree:
    """Flat node arrays; ``feature[k] == -1`` marks a leaf.

    Internal node ``k`` sends a row left when ``x[feature[k]] <= threshold[k]``.
    """

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, RegressionTree):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def _add(self, feature=LEAF, threshold=0.0, value=0.0) -> int:
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float(value))
        return len(self.feature) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def leaf_values(self) -> list:
        return [v for f, v in zip(self.feature, self.value) if f == LEAF]

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        active = feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            k = node[rows]
            go_left = X[rows, feature[k]] <= threshold[k]
            node[rows] = np.where(go_left, left[k], right[k])
            active = feature[node] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.value)[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": list(self.feature),
            "threshold": list(self.threshold),
            "left": list(self.left),
            "right": list(self.right),
            "value": list(self.value),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(
            [int(v) for v in d["feature"]],
            [float(v) for v in d["threshold"]],
            [int(v) for v in d["left"]],
            [int(v) for v in d["right"]],
            [float(v) for v in d["value"]],
        )


@dataclass(eq=False)
class GbmModel:
    base_score: float
    alpha: float
    n_features: int
    trees: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, GbmModel):
            return NotImplemented
        return (
            self.base_score == other.base_score
            and self.alpha == other.alpha
            and self.n_features == other.n_features
            and self.trees == other.trees
        )

    def predict(self, X) -> np.ndarray:
        X = check_design(X)
        if X.shape[1] != self.n_features:
            raise ValidationError(f"expected {self.n_features} features, got {X.shape[1]}")
        X = _dense(X)
        out = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            out += self.alpha * tree.predict(X)
        return out


def _dense(X) -> np.ndarray:
    return X.toarray() if sp.issparse(X) else np.asarray(X)


def _best_split(X: np.ndarray, resid: np.ndarray, rows: np.ndarray, lam: float, min_leaf: int):
    """Return ``(gain, feature, threshold)`` of the best split, or ``None``."""
    m = rows.shape[0]
    if m < 2 * min_leaf:
        return None
    Xn = X[rows]
    varying = np.flatnonzero(Xn.max(axis=0) > Xn.min(axis=0))
    if varying.size == 0:
        return None
    Xn = Xn[:, varying]
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    gs = resid[rows][order]

    total = resid[rows].sum()
    left_sum = np.cumsum(gs, axis=0)[:-1]
    n_left = np.arange(1, m, dtype=float)[:, None]
    n_right = m - n_left
    gain = (left_sum ** 2 / (n_left + lam)
            + (total - left_sum) ** 2 / (n_right + lam)
            - total ** 2 / (m + lam))
    valid = xs[1:] > xs[:-1]
    valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
    gain = np.where(valid, gain, -np.inf)

    # feature-major argmax: ties go to the lowest feature index, then lowest threshold
    flat = int(np.argmax(gain.T))
    j, i = divmod(flat, m - 1)
    best = gain[i, j]
    if not best > 0:
        return None
    threshold = 0.5 * (xs[i, j] + xs[i + 1, j])
    # midpoint can round onto the upper value for adjacent floats
    if not threshold < xs[i + 1, j]:
        threshold = xs[i, j]
    return float(best), int(varying[j]), float(threshold)


def _grow_tree(X, resid, config: GbmConfig) -> RegressionTree:
    tree = RegressionTree()
    lam = config.reg_lambda

    def leaf_value(rows):
        return float(resid[rows].sum() / (rows.shape[0] + lam)) if rows.size else 0.0

    root = tree._add(value=leaf_value(np.arange(X.shape[0])))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        if depth >= config.max_depth:
            continue
        split = _best_split(X, resid, rows, lam, config.min_samples_leaf)
        if split is None:
            continue
        _, feat, thr = split
        mask = X[rows, feat] <= thr
        left_rows, right_rows = rows[mask], rows[~mask]
        tree.feature[node] = feat
        tree.threshold[node] = thr
        tree.value[node] = 0.0
        tree.left[node] = tree._add(value=leaf_value(left_rows))
        tree.right[node] = tree._add(value=leaf_value(right_rows))
        stack.append((tree.right[node], right_rows, depth + 1))
        stack.append((tree.left[node], left_rows, depth + 1))
    return tree


def _gbm_path(X, y, config: GbmConfig):
    X = _dense(X)
    base = float(y.mean())
    model = GbmModel(base, config.alpha, X.shape[1])
    pred = np.full(y.shape[0], base)
    rmse = [float(np.sqrt(np.mean((y - pred) ** 2)))]
    for _ in range(config.rounds):
        tree = _grow_tree(X, y - pred, config)
        model.trees.append(tree)
        pred = pred + config.alpha * tree.predict(X)
        rmse.append(float(np.sqrt(np.mean((y - pred) ** 2))))
    return model, rmse


def fit_gbm(X, y, config: GbmConfig = GbmConfig()) -> GbmModel:
    """Boost ``config.rounds`` depth-limited trees on the running residuals.

    Prediction is ``base_score + alpha * sum(tree outputs)`` with
    ``base_score`` the mean training target.
    """
    X, y = check_design(X, y)
    return _gbm_path(X, y, config)[0]


class BoostedTreesRegressor(RegressorMixin, BaseEstimator):
    """Gradient-boosted regression trees (squared error, exact greedy splits).

    ``alpha`` is the shrinkage applied to every tree and ``reg_lambda`` the
    L2 penalty on leaf values.

    Attributes
    ----------
    train_rmse_ : list of float
        Training RMSE before the first round and after each round.
    """

    def __init__(self, rounds=100, alpha=0.3, reg_lambda=1.0, max_depth=3, min_samples_leaf=1):
        self.rounds = rounds
        self.alpha = alpha
        self.reg_lambda = reg_lambda
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, y):
        config = GbmConfig(self.rounds, self.alpha, self.reg_lambda, self.max_depth, self.min_samples_leaf)
        X, y = check_design(X, y)
        self.model_, self.train_rmse_ = _gbm_path(X, y, config)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise NotFittedError("BoostedTreesRegressor is not fitted yet")
        return self.model_.predict(X)
