"""Synthetic headlines with planted lexical sentiment.

Each headline mentions one company, one or two cue words and a few neutral
filler words. Its score is the sum of the cue-word weights plus Gaussian
noise, so a bag-of-words linear model can recover it. The committed sample
file ``finsent/data/sample_headlines.json`` is ``generate_headlines()`` with
its defaults.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from finsent.corpus import Dataset, HeadlineRecord, load_headlines

COMPANIES = (
    "Glencore", "Tesco", "Barclays", "Vodafone", "Unilever", "Rolls-Royce",
    "Diageo", "Aviva", "Burberry", "Lloyds", "Sainsbury", "Shell",
)

CUE_WEIGHTS = {
    "soars": 0.55, "surges": 0.45, "beats": 0.4, "upgrade": 0.35, "gains": 0.3,
    "rises": 0.25, "record": 0.2, "dividend": 0.15,
    "plunges": -0.55, "slumps": -0.45, "misses": -0.4, "downgrade": -0.35,
    "falls": -0.3, "cuts": -0.25, "loss": -0.2, "probe": -0.15,
}

FILLERS = (
    "shares", "profit", "quarter", "after", "analysts", "report", "outlook",
    "investors", "market", "sales", "ahead", "results", "chief", "executive",
    "deal", "stake", "europe", "update", "trading", "guidance",
)


def generate_headlines(n: int = 200, noise: float = 0.05, seed: int = 2017,
                       provenance: str = "synthetic") -> Dataset:
    rng = np.random.default_rng(seed)
    cues = sorted(CUE_WEIGHTS)
    records = []
    for i in range(n):
        company = COMPANIES[rng.integers(len(COMPANIES))]
        n_cues = 1 + int(rng.random() < 0.35)
        picked = [cues[j] for j in rng.choice(len(cues), size=n_cues, replace=False)]
        fillers = [FILLERS[j] for j in rng.choice(len(FILLERS), size=int(rng.integers(1, 4)), replace=False)]
        words = [picked[0]] + fillers
        if n_cues == 2:
            words.insert(int(rng.integers(1, len(words) + 1)), picked[1])
        title = " ".join([company] + words)
        score = sum(CUE_WEIGHTS[c] for c in picked) + rng.normal(0.0, noise)
        score = round(float(np.clip(score, -1.0, 1.0)), 3)
        records.append(HeadlineRecord(str(i + 1), company, title, score))
    return Dataset(records, provenance)


def toy_documents(n: int = 50, seed: int = 0) -> list:
    """Token lists for paragraph-vector checks; docs 0 and 1 are identical."""
    rng = np.random.default_rng(seed)
    vocab = sorted(CUE_WEIGHTS) + list(FILLERS)
    docs = []
    for _ in range(n):
        size = int(rng.integers(6, 11))
        docs.append([vocab[j] for j in rng.integers(len(vocab), size=size)])
    docs[1] = list(docs[0])
    return docs


def sample_headlines() -> Dataset:
    """Load the committed 200-headline sample corpus."""
    data = resources.files("finsent").joinpath("data/sample_headlines.json").read_bytes()
    return load_headlines(data, provenance="synthetic")
