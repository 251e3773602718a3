"""Paragraph vectors, distributed-memory variant (PV-DM), negative sampling.

For every position in a document the center word is predicted from the
mean of the document vector and the surrounding context word vectors.
Training is single-threaded and driven by one seeded ``numpy`` generator,
so identical inputs give bit-identical matrices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from finsent.exceptions import NotFittedError, ValidationError
from finsent.vectorize.ngram import as_token_lists

__all__ = ["PvConfig", "ParagraphVectorModel", "Inference", "fit_pv", "infer_pv", "ParagraphVectorizer"]

# exponent applied to unigram counts for the noise distribution
NOISE_POWER = 0.75


@dataclass(frozen=True)
class PvConfig:
    dim: int = 832
    epochs: int = 40
    window: int = 5
    negative: int = 5
    initial_rate: float = 0.025
    final_rate: float = 0.0001
    seed: int = 0

    def __post_init__(self):
        for name in ("dim", "epochs", "window", "negative"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not (self.initial_rate > self.final_rate > 0):
            raise ValidationError(
                f"need initial_rate > final_rate > 0, got {self.initial_rate} and {self.final_rate}"
            )


@dataclass(eq=False)
class ParagraphVectorModel:
    config: PvConfig
    words: tuple
    counts: tuple
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    doc_vectors: np.ndarray
    noise_cdf: np.ndarray
    epoch_losses: tuple = ()
    _index: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.words = tuple(self.words)
        self.counts = tuple(int(c) for c in self.counts)
        self.epoch_losses = tuple(float(v) for v in self.epoch_losses)
        self._index = {w: i for i, w in enumerate(self.words)}

    def __eq__(self, other):
        if not isinstance(other, ParagraphVectorModel):
            return NotImplemented
        return (
            self.config == other.config
            and self.words == other.words
            and self.counts == other.counts
            and self.epoch_losses == other.epoch_losses
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("input_vectors", "output_vectors", "doc_vectors", "noise_cdf")
            )
        )

    @property
    def dim(self) -> int:
        return self.config.dim

    def word_ids(self, doc: Sequence[str]) -> list:
        return [self._index[t] for t in doc if t in self._index]


class Inference(NamedTuple):
    vector: np.ndarray
    oov: bool


def _noise_cdf(counts) -> np.ndarray:
    weights = np.asarray(counts, dtype=float) ** NOISE_POWER
    return np.cumsum(weights) / weights.sum()


def _draw_negatives(rng: np.random.Generator, cdf: np.ndarray, k: int, target: int) -> np.ndarray:
    draws = np.searchsorted(cdf, rng.random(k), side="right")
    np.minimum(draws, len(cdf) - 1, out=draws)
    return draws[draws != target]


def _init_vectors(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    return (rng.random((rows, dim)) - 0.5) / dim


def _log_sigmoid_loss(scores: np.ndarray) -> float:
    # first score belongs to the true word, the rest are noise words
    return float(np.logaddexp(0.0, -scores[0]) + np.logaddexp(0.0, scores[1:]).sum())


def _dm_step(doc_vec, ctx, target, negatives, W, O, lr, train_words):
    """One PV-DM negative-sampling update. Returns the pair loss.

    ``doc_vec`` is updated in place; ``W`` and ``O`` only when ``train_words``.
    """
    n_inputs = 1 + len(ctx)
    l1 = (doc_vec + W[ctx].sum(axis=0)) / n_inputs
    rows = np.concatenate(([target], negatives))
    labels = np.zeros(len(rows))
    labels[0] = 1.0
    scores = O[rows] @ l1
    loss = _log_sigmoid_loss(scores)
    g = (labels - 1.0 / (1.0 + np.exp(-scores))) * lr
    # full error goes to every input vector (reference CBOW-mean convention)
    neu1e = g @ O[rows]
    if train_words:
        np.add.at(O, rows, np.outer(g, l1))
        if ctx:
            np.add.at(W, ctx, neu1e)
    doc_vec += neu1e
    return loss


def _contexts(ids: Sequence[int], window: int):
    for pos, target in enumerate(ids):
        ctx = list(ids[max(0, pos - window):pos]) + list(ids[pos + 1:pos + 1 + window])
        yield target, ctx


def fit_pv(corpus: Sequence[Sequence[str]], config: PvConfig = PvConfig()) -> ParagraphVectorModel:
    """Train PV-DM document and word vectors on ``corpus``.

    The learning rate decays linearly from ``initial_rate`` to
    ``final_rate`` across every update of every epoch. The model keeps the
    mean negative-sampling loss of each epoch in ``epoch_losses``.
    """
    corpus = [list(doc) for doc in corpus]
    if not corpus:
        raise ValidationError("cannot train paragraph vectors on an empty corpus")
    freq = Counter(t for doc in corpus for t in doc)
    if not freq:
        raise ValidationError("corpus contains no tokens")
    words = sorted(freq)
    counts = [freq[w] for w in words]
    index = {w: i for i, w in enumerate(words)}
    docs = [[index[t] for t in doc] for doc in corpus]

    rng = np.random.default_rng(config.seed)
    W = _init_vectors(rng, len(words), config.dim)
    D = _init_vectors(rng, len(docs), config.dim)
    O = np.zeros((len(words), config.dim))
    cdf = _noise_cdf(counts)

    total = config.epochs * sum(len(d) for d in docs)
    decay = (config.initial_rate - config.final_rate) / max(total - 1, 1)
    step = 0
    losses = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        for d, ids in enumerate(docs):
            for target, ctx in _contexts(ids, config.window):
                lr = config.initial_rate - decay * step
                negatives = _draw_negatives(rng, cdf, config.negative, target)
                epoch_loss += _dm_step(D[d], ctx, target, negatives, W, O, lr, True)
                step += 1
        losses.append(epoch_loss / max(1, sum(len(d) for d in docs)))

    return ParagraphVectorModel(config, words, counts, W, O, D, cdf, losses)


def infer_pv(model: ParagraphVectorModel, doc: Sequence[str], steps: int = None, seed: int = None) -> Inference:
    """Fit a fresh document vector for ``doc`` with the word matrices frozen.

    Out-of-vocabulary tokens are skipped. If nothing is left, the seeded
    initial vector is returned with ``oov=True``.
    """
    cfg = model.config
    steps = cfg.epochs if steps is None else steps
    seed = cfg.seed if seed is None else seed
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    rng = np.random.default_rng(seed)
    vec = _init_vectors(rng, 1, cfg.dim)[0]
    ids = model.word_ids(doc)
    if not ids:
        return Inference(vec, True)

    total = steps * len(ids)
    decay = (cfg.initial_rate - cfg.final_rate) / max(total - 1, 1)
    step = 0
    for _ in range(steps):
        for target, ctx in _contexts(ids, cfg.window):
            lr = cfg.initial_rate - decay * step
            negatives = _draw_negatives(rng, model.noise_cdf, cfg.negative, target)
            _dm_step(vec, ctx, target, negatives, model.input_vectors, model.output_vectors, lr, False)
            step += 1
    return Inference(vec, False)


class ParagraphVectorizer(TransformerMixin, BaseEstimator):
    """Paragraph-vector document embeddings.

    ``fit_transform`` returns the vectors learned for the training documents;
    ``transform`` infers new vectors (``infer_steps`` passes, default
    ``epochs``) with the word matrices frozen.
    """

    def __init__(self, dim=832, epochs=40, window=5, negative=5, initial_rate=0.025,
                 final_rate=0.0001, seed=0, infer_steps=None):
        self.dim = dim
        self.epochs = epochs
        self.window = window
        self.negative = negative
        self.initial_rate = initial_rate
        self.final_rate = final_rate
        self.seed = seed
        self.infer_steps = infer_steps

    def _config(self) -> PvConfig:
        return PvConfig(self.dim, self.epochs, self.window, self.negative,
                        self.initial_rate, self.final_rate, self.seed)

    def fit(self, X, y=None):
        self.model_ = fit_pv(as_token_lists(X), self._config())
        return self

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).model_.doc_vectors.copy()

    def transform(self, X):
        if not hasattr(self, "model_"):
            raise NotFittedError("ParagraphVectorizer is not fitted yet")
        docs = as_token_lists(X)
        out = np.empty((len(docs), self.model_.dim))
        for i, doc in enumerate(docs):
            out[i] = infer_pv(self.model_, doc, self.infer_steps).vector
        return out
