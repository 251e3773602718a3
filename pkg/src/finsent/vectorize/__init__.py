"""Document vectorizers: word n-gram counts, smoothed TF-IDF, paragraph vectors."""

from finsent.vectorize.ngram import (
    NgramConfig,
    NgramVectorizer,
    SparseVector,
    TfidfModel,
    TfidfVectorizer,
    Vocabulary,
    fit_ngram,
    fit_tfidf,
    transform_ngram,
    transform_tfidf,
)
from finsent.vectorize.paragraph import (
    Inference,
    ParagraphVectorizer,
    ParagraphVectorModel,
    PvConfig,
    fit_pv,
    infer_pv,
)

__all__ = [
    "NgramConfig",
    "NgramVectorizer",
    "SparseVector",
    "TfidfModel",
    "TfidfVectorizer",
    "Vocabulary",
    "fit_ngram",
    "fit_tfidf",
    "transform_ngram",
    "transform_tfidf",
    "Inference",
    "ParagraphVectorizer",
    "ParagraphVectorModel",
    "PvConfig",
    "fit_pv",
    "infer_pv",
]
