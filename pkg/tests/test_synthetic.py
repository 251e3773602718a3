import numpy as np

from finsent.corpus import dump_headlines, tokenize
from finsent.synthetic import CUE_WEIGHTS, generate_headlines, sample_headlines, toy_documents


def test_bundled_sample_matches_generator():
    assert dump_headlines(sample_headlines()) == dump_headlines(generate_headlines())


def test_sample_shape():
    ds = sample_headlines()
    assert len(ds) == 200
    assert all(-1.0 <= s <= 1.0 for s in ds.sentiments)
    assert all(r.company.lower() in r.title.lower() for r in ds)


def test_scores_follow_cue_weights():
    ds = generate_headlines(300, noise=0.0, seed=5)
    for r in ds:
        planted = sum(CUE_WEIGHTS.get(t, 0.0) for t in tokenize(r.title))
        assert r.sentiment == round(float(np.clip(planted, -1, 1)), 3)


def test_noise_level():
    ds = generate_headlines(2000, seed=1)
    resid = [r.sentiment - sum(CUE_WEIGHTS.get(t, 0.0) for t in tokenize(r.title)) for r in ds]
    assert 0.04 < np.std(resid) < 0.06


def test_toy_documents():
    docs = toy_documents(50)
    assert len(docs) == 50 and docs[0] == docs[1]
    assert toy_documents(50) == docs
