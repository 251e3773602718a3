"""Word n-gram count and smoothed TF-IDF vectorizers."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin

from finsent.corpus import tokenize
from finsent.exceptions import NotFittedError, ValidationError

__all__ = [
    "NgramConfig",
    "Vocabulary",
    "SparseVector",
    "TfidfModel",
    "iter_ngrams",
    "fit_ngram",
    "transform_ngram",
    "fit_tfidf",
    "transform_tfidf",
    "NgramVectorizer",
    "TfidfVectorizer",
]


@dataclass(frozen=True)
class NgramConfig:
    n_min: int = 1
    n_max: int = 2
    min_df: int = 1
    max_features: Optional[int] = None

    def __post_init__(self):
        for name in ("n_min", "n_max", "min_df"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(f"{name} must be an integer, got {value!r}")
        if self.n_min < 1:
            raise ValidationError(f"n_min must be >= 1, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ValidationError(f"n_max ({self.n_max}) must be >= n_min ({self.n_min})")
        if self.min_df < 1:
            raise ValidationError(f"min_df must be >= 1, got {self.min_df}")
        if self.max_features is not None and (
            isinstance(self.max_features, bool)
            or not isinstance(self.max_features, int)
            or self.max_features < 1
        ):
            raise ValidationError(f"max_features must be a positive integer, got {self.max_features!r}")


@dataclass(frozen=True)
class Vocabulary:
    """Lexicographically indexed n-gram vocabulary with document frequencies."""

    terms: tuple
    doc_freq: tuple
    num_docs: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "doc_freq", tuple(int(d) for d in self.doc_freq))
        if len(self.terms) != len(self.doc_freq):
            raise ValidationError("terms and doc_freq lengths differ")
        if list(self.terms) != sorted(set(self.terms)):
            raise ValidationError("vocabulary terms must be unique and sorted")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term) -> bool:
        return term in self._index

    @property
    def term_index(self) -> dict:
        return dict(self._index)

    def index(self, term: str) -> Optional[int]:
        return self._index.get(term)

    def to_dict(self) -> dict:
        return {"terms": list(self.terms), "doc_freq": list(self.doc_freq), "num_docs": self.num_docs}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(d["terms"], d["doc_freq"], d["num_docs"])


@dataclass(frozen=True)
class SparseVector:
    indices: tuple
    values: tuple
    dimension: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        vals = tuple(float(v) for v in self.values)
        if len(idx) != len(vals):
            raise ValidationError("indices and values lengths differ")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.dimension):
            raise ValidationError("index out of range")
        if any(v == 0.0 for v in vals):
            raise ValidationError("explicit zeros are not stored")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    def as_dict(self) -> dict:
        return dict(zip(self.indices, self.values))

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        out[list(self.indices)] = self.values
        return out

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: Vocabulary
    idf: tuple

    def __post_init__(self):
        object.__setattr__(self, "idf", tuple(float(v) for v in self.idf))
        if len(self.idf) != len(self.vocabulary):
            raise ValidationError("idf length differs from vocabulary size")

    def to_dict(self) -> dict:
        return {"vocabulary": self.vocabulary.to_dict(), "idf": list(self.idf)}

    @classmethod
    def from_dict(cls, d: dict) -> "TfidfModel":
        return cls(Vocabulary.from_dict(d["vocabulary"]), d["idf"])


def iter_ngrams(tokens: Sequence[str], n_min: int, n_max: int):
    """Yield space-joined word n-grams, shortest first."""
    tokens = list(tokens)
    for n in range(n_min, n_max + 1):
        for i in range(len(tokens) - n + 1):
            yield " ".join(tokens[i:i + n])


def fit_ngram(corpus: Sequence[Sequence[str]], config: NgramConfig = NgramConfig()) -> Vocabulary:
    """Collect n-grams with document frequency >= ``min_df``.

    With ``max_features`` set, the most document-frequent terms are kept,
    ties broken lexicographically. Indices are assigned in lexicographic
    term order so the result does not depend on corpus order.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValidationError("cannot fit a vocabulary on an empty corpus")
    df = Counter()
    for doc in corpus:
        df.update(set(iter_ngrams(doc, config.n_min, config.n_max)))
    kept = [(t, c) for t, c in df.items() if c >= config.min_df]
    if config.max_features is not None and len(kept) > config.max_features:
        kept.sort(key=lambda tc: (-tc[1], tc[0]))
        kept = kept[:config.max_features]
    kept.sort()
    return Vocabulary([t for t, _ in kept], [c for _, c in kept], len(corpus))


def _count_vector(vocab: Vocabulary, doc: Sequence[str], n_min: int, n_max: int) -> Counter:
    counts = Counter()
    for gram in iter_ngrams(doc, n_min, n_max):
        j = vocab.index(gram)
        if j is not None:
            counts[j] += 1
    return counts


def _ngram_range(vocab: Vocabulary, config: Optional[NgramConfig]):
    if config is not None:
        return config.n_min, config.n_max
    lengths = [t.count(" ") + 1 for t in vocab.terms] or [1]
    return min(lengths), max(lengths)


def transform_ngram(vocab: Vocabulary, doc: Sequence[str], config: Optional[NgramConfig] = None) -> SparseVector:
    """Raw n-gram counts of ``doc`` over ``vocab``; unknown n-grams are dropped.

    The n-gram range defaults to the span of term lengths in ``vocab``.
    """
    n_min, n_max = _ngram_range(vocab, config)
    counts = _count_vector(vocab, doc, n_min, n_max)
    idx = sorted(counts)
    return SparseVector(idx, [counts[i] for i in idx], len(vocab))


def smoothed_idf(doc_freq, num_docs: int) -> np.ndarray:
    """``ln((1 + N) / (1 + df)) + 1``."""
    df = np.asarray(doc_freq, dtype=float)
    return np.log((1.0 + num_docs) / (1.0 + df)) + 1.0


def fit_tfidf(corpus: Sequence[Sequence[str]], config: NgramConfig = NgramConfig()) -> TfidfModel:
    vocab = fit_ngram(corpus, config)
    return TfidfModel(vocab, smoothed_idf(vocab.doc_freq, vocab.num_docs).tolist())


def transform_tfidf(model: TfidfModel, doc: Sequence[str], config: Optional[NgramConfig] = None) -> SparseVector:
    """Count times idf, L2-normalized. All-zero vectors are returned as-is."""
    n_min, n_max = _ngram_range(model.vocabulary, config)
    counts = _count_vector(model.vocabulary, doc, n_min, n_max)
    idx = sorted(counts)
    vals = [counts[i] * model.idf[i] for i in idx]
    norm = math.sqrt(sum(v * v for v in vals))
    if norm > 0:
        vals = [v / norm for v in vals]
    return SparseVector(idx, vals, len(model.vocabulary))


def as_token_lists(docs: Iterable) -> list:
    """Accept raw strings or pre-tokenized sequences."""
    out = []
    for doc in docs:
        if isinstance(doc, str):
            out.append(tokenize(doc))
        else:
            out.append(list(doc))
    return out


def _stack(rows: Sequence[SparseVector], dimension: int) -> sp.csr_matrix:
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, row in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(row.indices)
    indices = np.fromiter((j for row in rows for j in row.indices), dtype=np.int64, count=indptr[-1])
    data = np.fromiter((v for row in rows for v in row.values), dtype=float, count=indptr[-1])
    return sp.csr_matrix((data, indices, indptr), shape=(len(rows), dimension))


class NgramVectorizer(TransformerMixin, BaseEstimator):
    """Bag of word n-grams with raw counts.

    Documents may be raw strings (run through :func:`finsent.corpus.tokenize`)
    or token lists. ``transform`` returns a CSR matrix.
    """

    def __init__(self, n_min=1, n_max=2, min_df=1, max_features=None):
        self.n_min = n_min
        self.n_max = n_max
        self.min_df = min_df
        self.max_features = max_features

    def _config(self) -> NgramConfig:
        return NgramConfig(self.n_min, self.n_max, self.min_df, self.max_features)

    def fit(self, X, y=None):
        self.config_ = self._config()
        self.vocabulary_ = fit_ngram(as_token_lists(X), self.config_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "vocabulary_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    def transform(self, X):
        self._check_fitted()
        rows = [transform_ngram(self.vocabulary_, d, self.config_) for d in as_token_lists(X)]
        return _stack(rows, len(self.vocabulary_))

    def get_feature_names_out(self, input_features=None):
        self._check_fitted()
        return np.asarray(self.vocabulary_.terms, dtype=object)


class TfidfVectorizer(NgramVectorizer):
    """N-gram counts reweighted by smoothed idf, rows L2-normalized."""

    def fit(self, X, y=None):
        self.config_ = self._config()
        self.model_ = fit_tfidf(as_token_lists(X), self.config_)
        self.vocabulary_ = self.model_.vocabulary
        return self

    @property
    def idf_(self) -> np.ndarray:
        return np.asarray(self.model_.idf)

    def transform(self, X):
        self._check_fitted()
        rows = [transform_tfidf(self.model_, d, self.config_) for d in as_token_lists(X)]
        return _stack(rows, len(self.vocabulary_))
