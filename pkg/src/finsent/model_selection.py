"""K-fold cross-validation and hyperparameter sweeps over pipeline configs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from sklearn.base import clone

from finsent.corpus import Dataset
from finsent.exceptions import ValidationError
from finsent.metrics import EvalReport, evaluate, mean_report
from finsent.pipeline import PipelineConfig, build_pipeline, describe_regressor, describe_vectorizer, parse_config
from finsent.regress import clip_scores

__all__ = [
    "k_fold_split",
    "CVResult",
    "cross_validate",
    "SweepGrid",
    "SweepRow",
    "grid_sweep",
    "load_grid",
    "sweep_table",
    "format_sweep_table",
]


def k_fold_split(n: int, k: int, seed: int = 0) -> list:
    """Shuffle ``0..n-1`` with ``seed`` and cut it into ``k`` folds.

    Fold sizes differ by at most one (larger folds first); indices within a
    fold are sorted.
    """
    if k < 2:
        raise ValidationError(f"need at least 2 folds, got {k}")
    if k > n:
        raise ValidationError(f"cannot split {n} records into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    return [sorted(int(i) for i in part) for part in np.array_split(perm, k)]


@dataclass
class CVResult:
    folds: list
    mean: EvalReport
    fold_indices: list
    estimators: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "folds": [r.to_dict() for r in self.folds],
            "mean": self.mean.to_dict(),
            "fold_indices": self.fold_indices,
        }


def _scored(dataset: Dataset) -> np.ndarray:
    missing = dataset.unscored_ids()
    if missing:
        raise ValidationError(f"unscored records: {', '.join(missing[:10])}")
    return np.asarray(dataset.sentiments, dtype=float)


def cross_validate(dataset: Dataset, pipeline: Union[PipelineConfig, object], k: int = 5,
                   seed: int = 0, clip: Optional[bool] = None) -> CVResult:
    """Fit on k-1 folds, score the held-out fold, for every fold.

    ``pipeline`` is a :class:`PipelineConfig` or any unfitted sklearn-style
    regressor taking a list of records; it is cloned for each fold so
    nothing fitted on one fold leaks into another. Held-out predictions are
    clipped to [-1, 1] when ``clip`` is true (default: the config's ``clip``,
    else no clipping). Folds with constant gold report ``r2=None`` and are
    left out of the mean R^2.
    """
    if isinstance(pipeline, PipelineConfig):
        clip = pipeline.clip if clip is None else clip
        pipeline = build_pipeline(pipeline)
    y = _scored(dataset)
    if len(dataset) < k:
        raise ValidationError(f"{len(dataset)} scored records cannot fill {k} folds")
    folds = k_fold_split(len(dataset), k, seed)
    records = list(dataset.records)
    reports, fitted = [], []
    for held in folds:
        held_set = set(held)
        train = [i for i in range(len(records)) if i not in held_set]
        est = clone(pipeline)
        est.fit([records[i] for i in train], y[train])
        pred = np.asarray(est.predict([records[i] for i in held]), dtype=float)
        if clip:
            pred = clip_scores(pred)
        reports.append(evaluate(y[held], pred, num_gold_total=len(held)))
        fitted.append(est)
    return CVResult(reports, mean_report(reports), folds, fitted)


@dataclass(frozen=True)
class SweepGrid:
    configs: tuple
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        configs = tuple(self.configs)
        if not configs:
            raise ValidationError("sweep grid is empty")
        if not all(isinstance(c, PipelineConfig) for c in configs):
            raise ValidationError("grid entries must be PipelineConfig objects")
        if isinstance(self.folds, bool) or not isinstance(self.folds, int) or self.folds < 2:
            raise ValidationError(f"folds must be an integer >= 2, got {self.folds!r}")
        object.__setattr__(self, "configs", configs)


def load_grid(raw) -> SweepGrid:
    """Parse ``{"configs": [...], "folds": 5, "seed": 0}``."""
    if not isinstance(raw, dict):
        raise ValidationError("sweep grid must be a JSON object")
    unknown = sorted(set(raw) - {"configs", "folds", "seed"})
    if unknown:
        raise ValidationError(f"grid: unknown key(s) {', '.join(map(repr, unknown))}")
    configs = raw.get("configs")
    if not isinstance(configs, list):
        raise ValidationError("grid.configs must be a list")
    return SweepGrid(tuple(parse_config(c) for c in configs), raw.get("folds", 5), raw.get("seed", 0))


@dataclass
class SweepRow:
    index: int
    config: PipelineConfig
    result: Optional[CVResult] = None
    error: Optional[str] = None

    @property
    def vectorizer(self) -> str:
        return self.config.name or describe_vectorizer(self.config)

    @property
    def learner(self) -> str:
        return describe_regressor(self.config)

    def sort_key(self):
        if self.result is None:
            return (1, 0.0, 0.0, self.index)
        m = self.result.mean
        r2 = m.r2 if m.r2 is not None else -math.inf
        return (0, -m.cosine_score, -r2, self.index)


def grid_sweep(dataset: Dataset, grid: SweepGrid) -> list:
    """Cross-validate every configuration and rank them.

    Rows are sorted by mean cosine score (descending), then mean R^2, then
    grid position. A configuration that raises is kept as a row with its
    error message and sorted last.
    """
    rows = []
    for i, config in enumerate(grid.configs):
        try:
            rows.append(SweepRow(i, config, cross_validate(dataset, config, grid.folds, grid.seed)))
        except Exception as exc:  # noqa: BLE001 - one bad cell must not abort the sweep
            rows.append(SweepRow(i, config, error=f"{type(exc).__name__}: {exc}"))
    return sorted(rows, key=SweepRow.sort_key)


def sweep_table(rows: Sequence[SweepRow], folds: Optional[int] = None) -> dict:
    """JSON-ready ranked table: vectorizer, learner, r2, cosine_score, fold details."""
    out = []
    for rank, row in enumerate(rows, start=1):
        entry = {
            "rank": rank,
            "vectorizer": row.vectorizer,
            "learner": row.learner,
            "r2": None,
            "cosine_score": None,
            "config": row.config.to_dict(),
        }
        if row.result is not None:
            entry["r2"] = row.result.mean.r2
            entry["cosine_score"] = row.result.mean.cosine_score
            entry["folds"] = [r.to_dict() for r in row.result.folds]
        else:
            entry["error"] = row.error
        out.append(entry)
    return {"protocol": f"{folds}-fold cross-validation" if folds else "cross-validation", "rows": out}


def format_sweep_table(rows: Sequence[SweepRow]) -> str:
    header = ("Vectorization Method", "Learning Model", "R2 Score", "Cosine Score")
    body = []
    for row in rows:
        if row.result is None:
            body.append((row.vectorizer, row.learner, "error", row.error or ""))
            continue
        m = row.result.mean
        body.append((row.vectorizer, row.learner,
                     "n/a" if m.r2 is None else f"{m.r2:.2f}", f"{m.cosine_score:.2f}"))
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(4)]
    line = "+".join("-" * (w + 2) for w in widths)
    fmt = lambda r: "|".join(f" {c:<{w}} " for c, w in zip(r, widths))  # noqa: E731
    return "\n".join([line, fmt(header), line, *[fmt(r) for r in body], line]) + "\n"


def dump_sweep(rows: Sequence[SweepRow], path, folds: Optional[int] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sweep_table(rows, folds), fh, indent=2)
        fh.write("\n")
