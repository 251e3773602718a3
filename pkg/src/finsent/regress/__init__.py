"""Regression learners behind one ``predict`` contract."""

from typing import Iterable

import numpy as np

from finsent.regress.boosting import BoostedTreesRegressor, GbmConfig, GbmModel, RegressionTree, fit_gbm
from finsent.regress.linear import (
    LeastSquaresRegressor,
    LinearModel,
    LinearSVR,
    SvrConfig,
    fit_ols,
    fit_svr,
    svr_objective,
)

__all__ = [
    "BoostedTreesRegressor",
    "GbmConfig",
    "GbmModel",
    "RegressionTree",
    "fit_gbm",
    "LeastSquaresRegressor",
    "LinearModel",
    "LinearSVR",
    "SvrConfig",
    "fit_ols",
    "fit_svr",
    "svr_objective",
    "predict",
    "clip_scores",
]


def predict(model, X) -> np.ndarray:
    """Raw (unclipped) predictions of a fitted ``LinearModel`` or ``GbmModel``."""
    if not isinstance(model, (LinearModel, GbmModel)):
        raise TypeError(f"cannot predict with {type(model).__name__}")
    return model.predict(X)


def clip_scores(scores: Iterable[float], low: float = -1.0, high: float = 1.0) -> np.ndarray:
    return np.clip(np.asarray(list(scores) if not isinstance(scores, np.ndarray) else scores, dtype=float), low, high)
