"""Task metrics: coefficient of determination and coverage-weighted cosine."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from finsent.exceptions import DegenerateGoldError, ValidationError, ZeroVectorError

__all__ = ["EvalReport", "r_squared", "cosine", "cosine_weight", "cosine_score", "evaluate", "mean_report"]


@dataclass(frozen=True)
class EvalReport:
    """Scores for one gold/predicted pairing.

    ``r2`` is ``None`` when the gold scores are constant (R^2 undefined).
    """

    r2: Optional[float]
    cosine: float
    cosine_weight: float
    cosine_score: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def _pair(gold, pred):
    g = np.asarray(gold, dtype=float).ravel()
    p = np.asarray(pred, dtype=float).ravel()
    if g.shape != p.shape:
        raise ValidationError(f"length mismatch: {g.size} gold vs {p.size} predicted")
    return g, p


def r_squared(gold: Sequence[float], pred: Sequence[float]) -> float:
    """``1 - SS_res / SS_tot``; negative when worse than predicting the mean."""
    g, p = _pair(gold, pred)
    if g.size < 2:
        raise DegenerateGoldError("R^2 needs at least two gold scores")
    # test constancy directly: the mean of equal floats need not equal them
    if np.all(g == g[0]):
        raise DegenerateGoldError("gold scores are constant; R^2 is undefined")
    ss_tot = float(np.sum((g - g.mean()) ** 2))
    return 1.0 - float(np.sum((g - p) ** 2)) / ss_tot


def cosine(gold: Sequence[float], pred: Sequence[float]) -> float:
    g, p = _pair(gold, pred)
    ng, np_ = math.sqrt(float(g @ g)), math.sqrt(float(p @ p))
    if ng == 0.0:
        raise ZeroVectorError("gold score vector has zero norm")
    if np_ == 0.0:
        raise ZeroVectorError("predicted score vector has zero norm")
    value = float(g @ p) / (ng * np_)
    return min(1.0, max(-1.0, value))


def cosine_weight(n_predicted: int, num_gold_total: int) -> float:
    """Coverage ``|P| / |G|``."""
    if num_gold_total < 1:
        raise ValidationError("gold set is empty")
    if not 0 < n_predicted <= num_gold_total:
        raise ValidationError(f"{n_predicted} predictions for {num_gold_total} gold scores")
    return n_predicted / num_gold_total


def cosine_score(gold: Sequence[float], pred: Sequence[float], num_gold_total: Optional[int] = None) -> float:
    """Official task score: coverage weight times cosine.

    ``gold`` and ``pred`` hold only the matched ids; ``num_gold_total`` is
    the size of the full gold set (defaults to ``len(gold)``).
    """
    g, p = _pair(gold, pred)
    total = g.size if num_gold_total is None else num_gold_total
    return cosine_weight(p.size, total) * cosine(g, p)


def evaluate(gold: Sequence[float], pred: Sequence[float], num_gold_total: Optional[int] = None) -> EvalReport:
    g, p = _pair(gold, pred)
    total = g.size if num_gold_total is None else num_gold_total
    try:
        r2 = r_squared(g, p)
    except DegenerateGoldError:
        r2 = None
    cos = cosine(g, p)
    weight = cosine_weight(p.size, total)
    return EvalReport(r2, cos, weight, weight * cos, int(p.size))


def mean_report(reports: Sequence[EvalReport]) -> EvalReport:
    """Arithmetic mean over reports; undefined R^2 values are left out."""
    if not reports:
        raise ValidationError("no reports to average")
    r2s = [r.r2 for r in reports if r.r2 is not None]
    return EvalReport(
        float(np.mean(r2s)) if r2s else None,
        float(np.mean([r.cosine for r in reports])),
        float(np.mean([r.cosine_weight for r in reports])),
        float(np.mean([r.cosine_score for r in reports])),
        int(sum(r.n for r in reports)),
    )
