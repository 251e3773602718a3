import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import BaseEstimator, RegressorMixin

from finsent.corpus import Dataset, HeadlineRecord
from finsent.exceptions import ValidationError
from finsent.model_selection import (
    SweepGrid,
    cross_validate,
    format_sweep_table,
    grid_sweep,
    k_fold_split,
    load_grid,
    sweep_table,
)
from finsent.pipeline import PipelineConfig, build_pipeline, parse_config
from finsent.synthetic import generate_headlines, sample_headlines


class ConstantRegressor(RegressorMixin, BaseEstimator):
    def __init__(self, value=0.0):
        self.value = value

    def fit(self, X, y):
        return self

    def predict(self, X):
        return np.full(len(X), self.value)


class TrainMeanRegressor(RegressorMixin, BaseEstimator):
    def fit(self, X, y):
        self.mean_ = float(np.mean(y))
        return self

    def predict(self, X):
        return np.full(len(X), self.mean_)


UNI_OLS = parse_config({"vectorizer": {"kind": "ngram", "n_max": 1}, "regressor": {"kind": "ols"}})


class TestKFold:
    def test_n6_k3(self):
        folds = k_fold_split(6, 3, seed=0)
        assert [len(f) for f in folds] == [2, 2, 2]
        assert sorted(i for f in folds for i in f) == list(range(6))

    def test_uneven(self):
        assert sorted(len(f) for f in k_fold_split(5, 2)) == [2, 3]

    def test_deterministic(self):
        assert k_fold_split(17, 4, 9) == k_fold_split(17, 4, 9)
        assert k_fold_split(17, 4, 9) != k_fold_split(17, 4, 10)

    @pytest.mark.parametrize("n,k", [(3, 4), (5, 1), (5, 0)])
    def test_invalid(self, n, k):
        with pytest.raises(ValidationError):
            k_fold_split(n, k)


@given(st.integers(2, 60).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n), st.integers(0, 2**32 - 1))))
def test_folds_partition(args):
    n, k, seed = args
    folds = k_fold_split(n, k, seed)
    flat = [i for f in folds for i in f]
    assert sorted(flat) == list(range(n))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1


class TestCrossValidate:
    def test_memorizing_pipeline(self):
        result = cross_validate(sample_headlines(), UNI_OLS, k=5, seed=0)
        assert result.mean.r2 >= 0.95
        assert len(result.folds) == 5
        assert all(r.cosine_weight == 1.0 for r in result.folds)

    def test_constant_global_mean(self):
        ds = sample_headlines()
        est = ConstantRegressor(float(np.mean(ds.sentiments)))
        result = cross_validate(ds, est, k=5, seed=3)
        assert all(r.r2 <= 0 for r in result.folds)

    def test_train_mean_not_better_than_fold_mean(self):
        result = cross_validate(sample_headlines(), TrainMeanRegressor(), k=4)
        assert all(r.r2 <= 0 for r in result.folds)

    def test_leave_one_out_degenerate(self):
        ds = generate_headlines(8, seed=1)
        result = cross_validate(ds, TrainMeanRegressor(), k=8)
        assert all(r.r2 is None for r in result.folds)
        assert result.mean.r2 is None
        assert len(result.folds) == 8

    def test_too_few_records(self):
        with pytest.raises(ValidationError):
            cross_validate(generate_headlines(3), UNI_OLS, k=5)

    def test_unscored_rejected(self):
        ds = Dataset([HeadlineRecord(str(i), "X", f"x w{i}", None if i == 2 else 0.1 * i) for i in range(6)])
        with pytest.raises(ValidationError, match="unscored"):
            cross_validate(ds, UNI_OLS, k=2)

    def test_no_leakage(self):
        base = sample_headlines()
        # every record carries its own sentinel token
        ds = Dataset([HeadlineRecord(r.id, r.company, f"{r.title} zzsent{r.id}", r.sentiment) for r in base])
        result = cross_validate(ds, UNI_OLS, k=5, seed=11)
        for held, est in zip(result.fold_indices, result.estimators):
            vocab = est.named_steps["vectorize"].vocabulary_
            leaked = [i for i in held if f"zzsent{ds[i].id}" in vocab]
            assert leaked == []
            trained = [i for i in range(len(ds)) if i not in set(held)]
            assert all(f"zzsent{ds[i].id}" in vocab for i in trained)

    def test_does_not_mutate_template(self):
        pipe = build_pipeline(UNI_OLS)
        cross_validate(sample_headlines(), pipe, k=3)
        assert not hasattr(pipe.named_steps["regress"], "model_")

    def test_clip_toggle(self):
        ds = sample_headlines()
        wild = ConstantRegressor(5.0)
        clipped = cross_validate(ds, wild, k=3, clip=True)
        raw = cross_validate(ds, wild, k=3, clip=False)
        assert clipped.mean.r2 > raw.mean.r2


GRID_RAW = {
    "configs": [
        {"vectorizer": {"kind": "ngram", "n_max": 1}, "regressor": {"kind": "ols"}},
        {"vectorizer": {"kind": "pv", "dim": 8, "epochs": 20}, "regressor": {"kind": "ols"}},
    ],
    "folds": 3,
    "seed": 0,
}


class TestSweep:
    def test_singleton_equals_cv(self):
        ds = generate_headlines(60, seed=4)
        rows = grid_sweep(ds, SweepGrid((UNI_OLS,), folds=3, seed=2))
        direct = cross_validate(ds, UNI_OLS, k=3, seed=2)
        assert len(rows) == 1
        assert rows[0].result.mean == direct.mean

    def test_ngram_beats_paragraph_vectors(self):
        ds = generate_headlines(60, seed=4)
        rows = grid_sweep(ds, load_grid(GRID_RAW))
        assert [r.config.vectorizer["kind"] for r in rows] == ["ngram", "pv"]

    def test_identical_configs_tie(self):
        ds = generate_headlines(40, seed=5)
        a = parse_config({"vectorizer": {"kind": "ngram"}, "regressor": {"kind": "ols"}, "name": "a"})
        b = parse_config({"vectorizer": {"kind": "ngram"}, "regressor": {"kind": "ols"}, "name": "b"})
        rows = grid_sweep(ds, SweepGrid((a, b), folds=3))
        assert [r.config.name for r in rows] == ["a", "b"]
        assert rows[0].result.mean == rows[1].result.mean

    def test_permutation_invariant(self):
        ds = generate_headlines(40, seed=6)
        configs = [parse_config({"vectorizer": {"kind": v}, "regressor": {"kind": r}})
                   for v in ("ngram", "tfidf") for r in ("ols", "gbm")]
        fwd = grid_sweep(ds, SweepGrid(tuple(configs), folds=3))
        rev = grid_sweep(ds, SweepGrid(tuple(reversed(configs)), folds=3))
        assert [r.config for r in fwd] == [r.config for r in rev]

    def test_failure_captured(self):
        ds = generate_headlines(40, seed=7)
        bad = parse_config({"vectorizer": {"kind": "ngram", "min_df": 1000}, "regressor": {"kind": "ols"}})
        rows = grid_sweep(ds, SweepGrid((bad, UNI_OLS), folds=3))
        assert rows[0].result is not None
        assert rows[1].result is None and rows[1].error
        table = sweep_table(rows, 3)
        assert table["rows"][1]["r2"] is None and "error" in table["rows"][1]
        assert "error" in format_sweep_table(rows)

    def test_table_columns(self):
        ds = generate_headlines(40, seed=8)
        rows = grid_sweep(ds, SweepGrid((UNI_OLS,), folds=3))
        text = format_sweep_table(rows)
        header = [c.strip() for c in text.splitlines()[1].split("|")]
        assert header == ["Vectorization Method", "Learning Model", "R2 Score", "Cosine Score"]
        entry = sweep_table(rows, 3)["rows"][0]
        assert {"vectorizer", "learner", "r2", "cosine_score", "folds"} <= set(entry)
        assert sweep_table(rows, 3)["protocol"] == "3-fold cross-validation"

    @pytest.mark.parametrize("raw", [
        {"configs": []},
        {"configs": [{}], "folds": 1},
        {"configs": [{}], "extra": 1},
        [],
    ])
    def test_grid_validation(self, raw):
        with pytest.raises(ValidationError):
            load_grid(raw)


class TestPipelineConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.vectorizer == {"kind": "ngram", "n_min": 1, "n_max": 2, "min_df": 1, "max_features": None}
        assert cfg.regressor == {"kind": "ols", "ridge": 1e-8}
        assert cfg.mask_companies and cfg.clip

    def test_round_trip(self):
        cfg = parse_config({"vectorizer": {"kind": "pv", "dim": 8}, "regressor": {"kind": "gbm", "lambda": 2.0},
                            "seed": 4, "name": "x"})
        assert parse_config(cfg.to_dict()) == cfg
        assert cfg.vectorizer_config().seed == 4
        assert cfg.regressor_config().reg_lambda == 2.0

    @pytest.mark.parametrize("raw,field", [
        ({"vectorizer": {"kind": "ngram", "n_min": 3, "n_max": 1}}, "n_max"),
        ({"vectorizer": {"kind": "ngram", "nmax": 1}}, "nmax"),
        ({"regressor": {"kind": "lasso"}}, "kind"),
        ({"regressor": {"kind": "svr", "c": -1}}, "c"),
        ({"regressor": {"kind": "ols", "ridge": -1}}, "ridge"),
        ({"seed": -2}, "seed"),
        ({"clip": "yes"}, "clip"),
        ({"typo": 1}, "typo"),
    ])
    def test_invalid(self, raw, field):
        with pytest.raises(ValidationError, match=field):
            parse_config(raw)

    def test_masking_in_pipeline(self):
        pipe = build_pipeline(UNI_OLS)
        pipe.fit(list(sample_headlines()), sample_headlines().sentiments)
        vocab = pipe.named_steps["vectorize"].vocabulary_
        assert "_org_" in vocab and "glencore" not in vocab
        unmasked = build_pipeline(parse_config({**UNI_OLS.to_dict(), "mask_companies": False}))
        unmasked.fit(list(sample_headlines()), sample_headlines().sentiments)
        assert "glencore" in unmasked.named_steps["vectorize"].vocabulary_
