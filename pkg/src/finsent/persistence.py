"""Versioned JSON containers for fitted vectorizers, regressors and bundles.

Every container has the shape::

    {"format_version": 1, "kind": "<kind>", "payload": {...}}

Matrices are stored as row-major nested lists. Python's float ``repr`` is
the shortest string that round-trips, so floats are restored bit-exactly.
"""

from __future__ import annotations

import json

import numpy as np

from finsent.exceptions import ValidationError
from finsent.pipeline import PipelineConfig, build_pipeline, parse_config
from finsent.regress import (
    BoostedTreesRegressor,
    GbmModel,
    LeastSquaresRegressor,
    LinearModel,
    LinearSVR,
    RegressionTree,
)
from finsent.vectorize import (
    NgramConfig,
    NgramVectorizer,
    ParagraphVectorizer,
    ParagraphVectorModel,
    PvConfig,
    TfidfModel,
    TfidfVectorizer,
    Vocabulary,
)

__all__ = ["FORMAT_VERSION", "encode", "decode", "dumps", "loads", "save", "load", "encode_bundle", "decode_bundle"]

FORMAT_VERSION = 1


def _container(kind: str, payload: dict) -> dict:
    return {"format_version": FORMAT_VERSION, "kind": kind, "payload": payload}


def _matrix(a: np.ndarray) -> list:
    return np.asarray(a, dtype=float).tolist()


def encode(estimator) -> dict:
    """Container for a fitted vectorizer or regressor."""
    params = estimator.get_params()
    if isinstance(estimator, TfidfVectorizer):
        return _container("tfidf", {"params": params, **estimator.model_.to_dict()})
    if isinstance(estimator, NgramVectorizer):
        return _container("ngram", {"params": params, "vocabulary": estimator.vocabulary_.to_dict()})
    if isinstance(estimator, ParagraphVectorizer):
        m = estimator.model_
        return _container("pv", {
            "params": params,
            "words": list(m.words),
            "counts": list(m.counts),
            "input_vectors": _matrix(m.input_vectors),
            "output_vectors": _matrix(m.output_vectors),
            "doc_vectors": _matrix(m.doc_vectors),
            "noise_cdf": _matrix(m.noise_cdf),
            "epoch_losses": list(m.epoch_losses),
        })
    if isinstance(estimator, (LeastSquaresRegressor, LinearSVR)):
        kind = "ols" if isinstance(estimator, LeastSquaresRegressor) else "svr"
        m = estimator.model_
        return _container(kind, {"params": params, "weights": _matrix(m.weights), "bias": m.bias})
    if isinstance(estimator, BoostedTreesRegressor):
        m = estimator.model_
        return _container("gbm", {
            "params": params,
            "base_score": m.base_score,
            "alpha": m.alpha,
            "n_features": m.n_features,
            "trees": [t.to_dict() for t in m.trees],
        })
    raise TypeError(f"cannot serialize {type(estimator).__name__}")


def _check_container(obj) -> tuple:
    if not isinstance(obj, dict) or set(obj) != {"format_version", "kind", "payload"}:
        raise ValidationError("not a finsent model container")
    if obj["format_version"] != FORMAT_VERSION:
        raise ValidationError(f"unsupported format_version {obj['format_version']!r}")
    return obj["kind"], obj["payload"]


def decode(obj: dict):
    """Rebuild the fitted estimator stored in a container."""
    kind, p = _check_container(obj)
    params = p["params"]
    if kind in ("ngram", "tfidf"):
        est = (NgramVectorizer if kind == "ngram" else TfidfVectorizer)(**params)
        est.config_ = NgramConfig(est.n_min, est.n_max, est.min_df, est.max_features)
        if kind == "tfidf":
            est.model_ = TfidfModel.from_dict(p)
            est.vocabulary_ = est.model_.vocabulary
        else:
            est.vocabulary_ = Vocabulary.from_dict(p["vocabulary"])
        return est
    if kind == "pv":
        est = ParagraphVectorizer(**params)
        config = PvConfig(est.dim, est.epochs, est.window, est.negative,
                          est.initial_rate, est.final_rate, est.seed)
        dim = config.dim
        est.model_ = ParagraphVectorModel(
            config,
            p["words"],
            p["counts"],
            np.asarray(p["input_vectors"], dtype=float).reshape(-1, dim),
            np.asarray(p["output_vectors"], dtype=float).reshape(-1, dim),
            np.asarray(p["doc_vectors"], dtype=float).reshape(-1, dim),
            np.asarray(p["noise_cdf"], dtype=float),
            p["epoch_losses"],
        )
        return est
    if kind in ("ols", "svr"):
        est = (LeastSquaresRegressor if kind == "ols" else LinearSVR)(**params)
        est.model_ = LinearModel(np.asarray(p["weights"], dtype=float), p["bias"])
        est.n_features_in_ = est.model_.n_features
        return est
    if kind == "gbm":
        est = BoostedTreesRegressor(**params)
        est.model_ = GbmModel(p["base_score"], p["alpha"], p["n_features"],
                              [RegressionTree.from_dict(t) for t in p["trees"]])
        est.n_features_in_ = est.model_.n_features
        return est
    raise ValidationError(f"unknown model kind {kind!r}")


def encode_bundle(config: PipelineConfig, pipeline) -> dict:
    """Single container holding the config and both fitted halves of a pipeline."""
    return _container("bundle", {
        "config": config.to_dict(),
        "vectorizer": encode(pipeline.named_steps["vectorize"]),
        "regressor": encode(pipeline.named_steps["regress"]),
    })


def decode_bundle(obj: dict):
    """Return ``(config, fitted pipeline)`` from a bundle container."""
    kind, p = _check_container(obj)
    if kind != "bundle":
        raise ValidationError(f"expected a bundle, got kind {kind!r}")
    config = parse_config(p["config"])
    pipeline = build_pipeline(config)
    vectorizer, regressor = decode(p["vectorizer"]), decode(p["regressor"])
    if type(vectorizer) is not type(pipeline.named_steps["vectorize"]) or \
            type(regressor) is not type(pipeline.named_steps["regress"]):
        raise ValidationError("bundle models do not match the bundled config")
    n_out = len(vectorizer.vocabulary_) if hasattr(vectorizer, "vocabulary_") else vectorizer.model_.dim
    if n_out != regressor.n_features_in_:
        raise ValidationError(
            f"vectorizer emits {n_out} features but regressor expects {regressor.n_features_in_}"
        )
    pipeline.steps[1] = ("vectorize", vectorizer)
    pipeline.steps[2] = ("regress", regressor)
    return config, pipeline


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=False, separators=(",", ":")) + "\n"


def loads(text) -> dict:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid model file: {exc}") from exc


def save(obj: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load(path) -> dict:
    with open(path, "rb") as fh:
        return loads(fh.read())
