from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kasper.intent.classes import CLASSES, Dataset, Example
from kasper.intent.knn import EmptyTrainingSet, KnnIndex, KTooLarge, knn_classify, sentence_vector
from kasper.intent.text import EmbeddingTable, random_embeddings


def table_2d():
    vocab = {"rain": 0, "goal": 1, "vote": 2, "cloud": 3}
    m = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.2], [0.9, 0.3]])
    return EmbeddingTable(vocab, m)


def test_identical_text_k1():
    train = Dataset([Example("goal", "Sports"), Example("rain", "Weather"), Example("vote", "News")])
    assert knn_classify("goal", train, table_2d(), k=1).label == "Sports"


def test_three_point_vote():
    # query along (-1, 0.25): hand-ranked cosines put the two News points first
    t = EmbeddingTable({"q": 0, "n1": 1, "n2": 2, "w": 3, "s": 4},
                       np.array([[-1.0, 0.25], [-1.0, 0.2], [-1.0, 0.4], [-0.2, 1.0], [1.0, 0.0]]))
    train = Dataset([Example("n1", "News"), Example("n2", "News"), Example("w", "Weather"), Example("s", "Sports")])
    pred = knn_classify("q", train, t, k=3)
    q = t.lookup("q")
    cos = {ex.text: float(t.lookup(ex.text) @ q / np.linalg.norm(t.lookup(ex.text)) / np.linalg.norm(q)) for ex in train}
    top3 = sorted(cos, key=cos.get, reverse=True)[:3]
    assert sorted(top3) == ["n1", "n2", "w"]
    assert pred.label == "News"
    assert pred.confidence == pytest.approx(2 / 3)


def test_k_too_large_and_empty():
    train = Dataset([Example("rain", "Weather")] * 5)
    with pytest.raises(KTooLarge):
        knn_classify("rain", train, table_2d(), k=10)
    with pytest.raises(EmptyTrainingSet):
        KnnIndex([], table_2d())


def test_oov_query_is_zero_vector():
    assert np.array_equal(sentence_vector("zzz qqq", table_2d()), np.zeros(2))
    train = Dataset([Example("rain", "Weather"), Example("goal", "Sports")])
    assert np.array_equal(KnnIndex(train, table_2d()).similarities("zzz"), np.zeros(2))


def test_tie_breaks_by_summed_similarity_then_class_order():
    train = Dataset([Example("rain", "Weather"), Example("goal", "Sports")])
    # equal votes; rain is closer to cloud
    assert knn_classify("cloud", train, table_2d(), k=2).label == "Weather"
    # all-zero similarities: class order decides
    assert knn_classify("zzz", train, table_2d(), k=2).label == min(["Weather", "Sports"], key=CLASSES.index)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(CLASSES[:4]), min_size=1, max_size=12), st.text(max_size=20))
def test_k_equals_n_predicts_majority(labels, query):
    words = ["rain", "goal", "vote", "cloud"]
    train = Dataset(Example(words[i % 4], lab) for i, lab in enumerate(labels))
    counts = Counter(labels)
    top = max(counts.values())
    winners = {c for c, n in counts.items() if n == top}
    pred = knn_classify(query or "x", train, table_2d(), k=len(train))
    assert pred.label in winners
    if len(winners) == 1:
        assert pred.label == winners.pop()
    assert sum(pred.distribution) == pytest.approx(1.0, abs=1e-9)


def test_index_reuse_matches_function():
    train = Dataset([Example("play music now", "Music and Audio"), Example("rain today", "Weather"),
                     Example("team score", "Sports")])
    t = random_embeddings(train.texts(), dim=6, seed=0)
    idx = KnnIndex(train, t)
    for q in ["music", "score today", "nothing"]:
        assert idx.classify(q, 2) == knn_classify(q, train, t, 2)
