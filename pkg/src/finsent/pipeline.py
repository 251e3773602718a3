"""Pipeline configuration and assembly.

A pipeline is an ordinary :class:`sklearn.pipeline.Pipeline`::

    records -> HeadlineText (mask company, tokenize) -> vectorizer -> regressor

Config files are JSON. Vectorizer and regressor are tagged by ``"kind"``::

    {"vectorizer": {"kind": "ngram", "n_min": 1, "n_max": 2},
     "regressor": {"kind": "ols", "ridge": 1e-8},
     "mask_companies": true, "clip": true, "seed": 0}

Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.pipeline import Pipeline

from finsent.corpus import DEFAULT_PLACEHOLDER, HeadlineRecord, mask_company, tokenize
from finsent.exceptions import ValidationError
from finsent.regress import BoostedTreesRegressor, GbmConfig, LeastSquaresRegressor, LinearSVR, SvrConfig
from finsent.vectorize import NgramConfig, NgramVectorizer, ParagraphVectorizer, PvConfig, TfidfVectorizer

__all__ = [
    "HeadlineText",
    "PipelineConfig",
    "parse_config",
    "load_config",
    "build_pipeline",
    "describe_vectorizer",
    "describe_regressor",
]

# accepted keys per kind, in canonical order, with defaults
VECTORIZER_FIELDS = {
    "ngram": {"n_min": 1, "n_max": 2, "min_df": 1, "max_features": None},
    "tfidf": {"n_min": 1, "n_max": 2, "min_df": 1, "max_features": None},
    "pv": {"dim": 832, "epochs": 40, "window": 5, "negative": 5, "initial_rate": 0.025,
           "final_rate": 0.0001, "seed": None, "infer_steps": None},
}
REGRESSOR_FIELDS = {
    "ols": {"ridge": 1e-8},
    "svr": {"c": 1.0, "epsilon": 0.1, "epochs": 200, "rate": 0.5, "seed": None},
    "gbm": {"rounds": 100, "alpha": 0.3, "lambda": 1.0, "max_depth": 3, "min_samples_leaf": 1},
}
TOP_LEVEL_FIELDS = ("vectorizer", "regressor", "mask_companies", "clip", "seed", "name")


class HeadlineText(TransformerMixin, BaseEstimator):
    """Turn headline records (or plain strings) into token lists.

    With ``mask=True`` each record's company mention is replaced by
    ``placeholder`` before tokenizing.
    """

    def __init__(self, mask=True, placeholder=DEFAULT_PLACEHOLDER):
        self.mask = mask
        self.placeholder = placeholder

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        out = []
        for item in X:
            if isinstance(item, HeadlineRecord):
                if self.mask:
                    item = mask_company(item, self.placeholder)
                item = item.title
            out.append(tokenize(item))
        return out


def _check_keys(section: str, given: dict, allowed) -> None:
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ValidationError(f"{section}: unknown key(s) {', '.join(map(repr, unknown))}")


def _section(section: str, raw, table: dict) -> dict:
    if not isinstance(raw, dict):
        raise ValidationError(f"{section} must be an object with a 'kind' field")
    kind = raw.get("kind")
    if kind not in table:
        raise ValidationError(f"{section}.kind must be one of {sorted(table)}, got {kind!r}")
    params = {k: v for k, v in raw.items() if k != "kind"}
    _check_keys(f"{section} ({kind})", params, table[kind])
    return {"kind": kind, **{k: params.get(k, d) for k, d in table[kind].items()}}


@dataclass(frozen=True)
class PipelineConfig:
    vectorizer: dict = field(default_factory=lambda: {"kind": "ngram"})
    regressor: dict = field(default_factory=lambda: {"kind": "ols"})
    mask_companies: bool = True
    clip: bool = True
    seed: int = 0
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "vectorizer", _section("vectorizer", self.vectorizer, VECTORIZER_FIELDS))
        object.__setattr__(self, "regressor", _section("regressor", self.regressor, REGRESSOR_FIELDS))
        for name in ("mask_companies", "clip"):
            if not isinstance(getattr(self, name), bool):
                raise ValidationError(f"{name} must be true or false")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed!r}")
        # constructing the typed configs validates every field
        try:
            self.vectorizer_config()
            self.regressor_config()
        except TypeError as exc:
            raise ValidationError(f"invalid config value: {exc}") from exc

    def vectorizer_config(self):
        v = dict(self.vectorizer)
        kind = v.pop("kind")
        if kind in ("ngram", "tfidf"):
            return NgramConfig(**v)
        v.pop("infer_steps")
        v["seed"] = self.seed if v["seed"] is None else v["seed"]
        return PvConfig(**v)

    def regressor_config(self):
        r = dict(self.regressor)
        kind = r.pop("kind")
        if kind == "ols":
            if not isinstance(r["ridge"], (int, float)) or isinstance(r["ridge"], bool) or r["ridge"] < 0:
                raise ValidationError(f"regressor.ridge must be a number >= 0, got {r['ridge']!r}")
            return r
        if kind == "svr":
            r["seed"] = self.seed if r["seed"] is None else r["seed"]
            return SvrConfig(**r)
        r["reg_lambda"] = r.pop("lambda")
        return GbmConfig(**r)

    def to_dict(self) -> dict:
        out = {
            "vectorizer": dict(self.vectorizer),
            "regressor": dict(self.regressor),
            "mask_companies": self.mask_companies,
            "clip": self.clip,
            "seed": self.seed,
        }
        if self.name is not None:
            out["name"] = self.name
        return out


def parse_config(raw) -> PipelineConfig:
    if not isinstance(raw, dict):
        raise ValidationError("pipeline config must be a JSON object")
    _check_keys("config", raw, TOP_LEVEL_FIELDS)
    return PipelineConfig(**raw)


def load_config(path) -> PipelineConfig:
    with open(path, "rb") as fh:
        try:
            raw = json.loads(fh.read().decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(raw)


def _make_vectorizer(config: PipelineConfig):
    kind = config.vectorizer["kind"]
    if kind == "ngram":
        return NgramVectorizer(**vars_of(config.vectorizer_config()))
    if kind == "tfidf":
        return TfidfVectorizer(**vars_of(config.vectorizer_config()))
    return ParagraphVectorizer(**vars_of(config.vectorizer_config()), infer_steps=config.vectorizer["infer_steps"])


def _make_regressor(config: PipelineConfig):
    kind = config.regressor["kind"]
    params = config.regressor_config()
    if kind == "ols":
        return LeastSquaresRegressor(**params)
    if kind == "svr":
        return LinearSVR(**vars_of(params))
    return BoostedTreesRegressor(**vars_of(params))


def vars_of(cfg) -> dict:
    return dict(cfg.__dict__)


def build_pipeline(config: PipelineConfig) -> Pipeline:
    """Unfitted ``Pipeline`` with steps ``text``, ``vectorize``, ``regress``."""
    return Pipeline([
        ("text", HeadlineText(mask=config.mask_companies)),
        ("vectorize", _make_vectorizer(config)),
        ("regress", _make_regressor(config)),
    ])


def describe_vectorizer(config: PipelineConfig) -> str:
    v = config.vectorizer
    if v["kind"] == "pv":
        return f"pv(dim={v['dim']}, epochs={v['epochs']})"
    return f"{v['kind']}({v['n_min']}-{v['n_max']})"


def describe_regressor(config: PipelineConfig) -> str:
    r = config.regressor
    if r["kind"] == "gbm":
        return f"gbm(alpha={r['alpha']}, lambda={r['lambda']})"
    return r["kind"]
