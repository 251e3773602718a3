import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.feature_extraction.text import CountVectorizer as SkCount
from sklearn.feature_extraction.text import TfidfVectorizer as SkTfidf

from finsent.exceptions import ValidationError
from finsent.synthetic import toy_documents
from finsent.vectorize.ngram import smoothed_idf
from finsent.vectorize import (
    NgramConfig,
    NgramVectorizer,
    ParagraphVectorizer,
    PvConfig,
    SparseVector,
    TfidfVectorizer,
    fit_ngram,
    fit_pv,
    fit_tfidf,
    infer_pv,
    transform_ngram,
    transform_tfidf,
)

UNI = NgramConfig(1, 1)


class TestNgram:
    def test_lexicographic_indices(self):
        vocab = fit_ngram([["stock", "rises"]], NgramConfig(1, 2, 1))
        assert vocab.term_index == {"rises": 0, "stock": 1, "stock rises": 2}

    def test_min_df_filters_everything(self):
        assert len(fit_ngram([["a"], ["b"]], NgramConfig(1, 2, min_df=2))) == 0

    def test_max_features_keeps_most_frequent(self):
        vocab = fit_ngram([["a", "b"], ["a", "c"]], NgramConfig(1, 1, 1, max_features=1))
        assert vocab.term_index == {"a": 0}

    def test_max_features_ties_lexicographic(self):
        vocab = fit_ngram([["c", "b", "a"]], NgramConfig(1, 1, 1, max_features=2))
        assert vocab.terms == ("a", "b")

    def test_counts(self):
        vocab = fit_ngram([["stock", "rises"]])
        vec = transform_ngram(vocab, ["stock", "rises", "stock"])
        assert vec.as_dict() == {0: 1, 1: 2, 2: 1}
        assert vec.dimension == 3

    @pytest.mark.parametrize("doc", [[], ["zzz", "yyy"]])
    def test_empty_transform(self, doc):
        vocab = fit_ngram([["stock", "rises"]])
        vec = transform_ngram(vocab, doc)
        assert len(vec.indices) == 0 and vec.dimension == 3

    def test_empty_corpus(self):
        with pytest.raises(ValidationError):
            fit_ngram([])

    def test_config_validation_names_field(self):
        with pytest.raises(ValidationError, match="n_max"):
            NgramConfig(2, 1)
        with pytest.raises(ValidationError, match="min_df"):
            NgramConfig(min_df=0)

    def test_sparse_vector_invariants(self):
        with pytest.raises(ValidationError):
            SparseVector((1, 0), (1.0, 1.0), 3)
        with pytest.raises(ValidationError):
            SparseVector((0,), (0.0,), 3)

    def test_matches_sklearn_counts(self):
        docs = [d for d in toy_documents(30)]
        ours = NgramVectorizer(1, 2).fit(docs)
        sk = SkCount(analyzer=lambda d: [" ".join(d[i:i + n]) for n in (1, 2) for i in range(len(d) - n + 1)])
        ref = sk.fit_transform(docs)
        assert list(ours.get_feature_names_out()) == list(sk.get_feature_names_out())
        assert np.array_equal(ours.transform(docs).toarray(), ref.toarray())


class TestTfidf:
    def test_idf_values(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], UNI)
        idf = dict(zip(model.vocabulary.terms, model.idf))
        assert idf["a"] == pytest.approx(1.0, abs=1e-12)
        assert idf["b"] == pytest.approx(math.log(1.5) + 1, abs=1e-12)
        assert idf["b"] == pytest.approx(1.405465, abs=1e-6)

    def test_single_doc_idf(self):
        model = fit_tfidf([["x", "y", "x"]], NgramConfig())
        assert np.allclose(model.idf, 1.0)

    def test_hand_example(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], UNI)
        vec = transform_tfidf(model, ["a", "b"])
        got = {model.vocabulary.terms[i]: v for i, v in vec.as_dict().items()}
        assert got["a"] == pytest.approx(0.579739, abs=1e-6)
        assert got["b"] == pytest.approx(0.814802, abs=1e-6)
        # the quoted norm 1.724922 is rounded loosely; sqrt(1 + 1.405465^2) = 1.724915
        assert math.hypot(1.0, math.log(1.5) + 1) == pytest.approx(1.724922, abs=1e-5)

    def test_single_token_unit(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], UNI)
        vec = transform_tfidf(model, ["c", "zzz"])
        assert list(vec.values) == [1.0]

    def test_oov_zero(self):
        model = fit_tfidf([["a", "b"]], UNI)
        assert transform_tfidf(model, ["q"]).norm() == 0.0

    def test_matches_sklearn(self):
        docs = toy_documents(40, seed=3)
        ours = TfidfVectorizer(1, 2).fit(docs)
        sk = SkTfidf(analyzer=lambda d: [" ".join(d[i:i + n]) for n in (1, 2) for i in range(len(d) - n + 1)])
        ref = sk.fit_transform(docs)
        assert np.allclose(ours.idf_, sk.idf_, atol=1e-12)
        assert np.allclose(ours.transform(docs).toarray(), ref.toarray(), atol=1e-12)


words = st.sampled_from(list("abcdefg"))
corpora = st.lists(st.lists(words, min_size=0, max_size=7), min_size=1, max_size=8)


@given(corpora, st.lists(words, max_size=10))
def test_ngram_counts_bounded(corpus, doc):
    vocab = fit_ngram(corpus)
    vec = transform_ngram(vocab, doc)
    total = len(doc) + max(len(doc) - 1, 0)
    assert all(v > 0 and float(v).is_integer() for v in vec.values)
    assert sum(vec.values) <= total


@given(corpora, st.randoms(use_true_random=False))
def test_vocabulary_order_invariant(corpus, rnd):
    shuffled = list(corpus)
    rnd.shuffle(shuffled)
    assert fit_ngram(corpus).term_index == fit_ngram(shuffled).term_index


@given(corpora, st.lists(words, min_size=1, max_size=10))
def test_tfidf_unit_norm(corpus, doc):
    model = fit_tfidf(corpus)
    vec = transform_tfidf(model, doc)
    if len(vec.indices):
        assert abs(vec.norm() - 1.0) <= 1e-9
    else:
        assert vec.norm() == 0.0


@given(st.integers(1, 50), st.lists(st.integers(1, 50), min_size=2, max_size=10))
def test_idf_monotone(n, dfs):
    dfs = sorted(min(d, n) for d in dfs)
    idf = smoothed_idf(dfs, n)
    assert all(a >= b for a, b in zip(idf, idf[1:]))
    assert all(v > 0 for v in idf)


def _cos(a, b):
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


@pytest.fixture(scope="module")
def toy_model():
    return fit_pv(toy_documents(50), PvConfig(dim=16, epochs=100, seed=7))


class TestParagraphVectors:
    def test_shapes_and_finite(self, toy_model):
        assert toy_model.doc_vectors.shape == (50, 16)
        for m in (toy_model.input_vectors, toy_model.output_vectors, toy_model.doc_vectors):
            assert np.isfinite(m).all()

    def test_one_row_per_doc(self):
        m = fit_pv([["a", "b"], ["b"], ["c", "a"]], PvConfig(dim=4, epochs=2))
        assert m.doc_vectors.shape == (3, 4)

    def test_bit_reproducible(self, toy_model):
        again = fit_pv(toy_documents(50), PvConfig(dim=16, epochs=100, seed=7))
        assert again.doc_vectors.tobytes() == toy_model.doc_vectors.tobytes()
        assert again == toy_model

    def test_seed_matters(self):
        a = fit_pv(toy_documents(10), PvConfig(dim=4, epochs=2, seed=0))
        b = fit_pv(toy_documents(10), PvConfig(dim=4, epochs=2, seed=1))
        assert not np.array_equal(a.doc_vectors, b.doc_vectors)

    def test_loss_drops(self, toy_model):
        assert toy_model.epoch_losses[4] < toy_model.epoch_losses[0]

    def test_duplicates_close(self, toy_model):
        assert _cos(toy_model.doc_vectors[0], toy_model.doc_vectors[1]) >= 0.9

    def test_infer_training_doc(self, toy_model):
        docs = toy_documents(50)
        sims = [_cos(infer_pv(toy_model, docs[i], steps=40).vector, toy_model.doc_vectors[i]) for i in range(10)]
        assert min(sims) >= 0.5

    def test_infer_oov(self, toy_model):
        first = infer_pv(toy_model, [], seed=3)
        second = infer_pv(toy_model, ["nothere"], seed=3)
        assert first.oov and second.oov
        assert np.array_equal(first.vector, second.vector)

    def test_infer_deterministic(self, toy_model):
        doc = toy_documents(50)[5]
        a = infer_pv(toy_model, doc, steps=10, seed=4)
        b = infer_pv(toy_model, doc, steps=10, seed=4)
        assert np.array_equal(a.vector, b.vector) and not a.oov

    def test_infer_does_not_touch_model(self, toy_model):
        before = toy_model.input_vectors.copy(), toy_model.output_vectors.copy()
        infer_pv(toy_model, toy_documents(50)[3], steps=5)
        assert np.array_equal(before[0], toy_model.input_vectors)
        assert np.array_equal(before[1], toy_model.output_vectors)

    def test_infer_steps_validated(self, toy_model):
        with pytest.raises(ValidationError):
            infer_pv(toy_model, ["soars"], steps=0)

    @pytest.mark.parametrize("kwargs", [{"dim": 0}, {"epochs": 0}, {"window": 0}, {"negative": 0},
                                        {"initial_rate": 0.001, "final_rate": 0.01}])
    def test_config_invariants(self, kwargs):
        with pytest.raises(ValidationError):
            PvConfig(**kwargs)

    def test_empty_corpus(self):
        with pytest.raises(ValidationError):
            fit_pv([], PvConfig(dim=4))
        with pytest.raises(ValidationError):
            fit_pv([[], []], PvConfig(dim=4))

    def test_estimator(self):
        docs = toy_documents(12)
        est = ParagraphVectorizer(dim=8, epochs=3, seed=1, infer_steps=2)
        train = est.fit_transform(docs)
        assert np.array_equal(train, est.model_.doc_vectors)
        assert est.transform(docs[:2]).shape == (2, 8)


@pytest.mark.slow
def test_default_dimension_smoke():
    model = fit_pv(toy_documents(20), PvConfig())
    assert model.doc_vectors.shape == (20, 832)
    assert model.config.epochs == 40
