"""K-nearest-neighbour classification over mean word vectors."""

from __future__ import annotations

import numpy as np

from kasper.intent.classes import CLASS_INDEX, CLASSES, N_CLASSES, Prediction
from kasper.intent.text import EmbeddingTable

DEFAULT_K = 5


class KTooLarge(ValueError):
    pass


class EmptyTrainingSet(ValueError):
    pass


def sentence_vector(text: str, table: EmbeddingTable) -> np.ndarray:
    vecs = table.embed_text(text)
    if len(vecs) == 0:
        return np.zeros(table.dim)
    return vecs.mean(axis=0)


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=-1, keepdims=True)
    return np.divide(m, norms, out=np.zeros_like(m), where=norms > 0)


class KnnIndex:
    def __init__(self, train, table: EmbeddingTable):
        train = list(train)
        if not train:
            raise EmptyTrainingSet("KNN needs a non-empty training set")
        self.table = table
        self.targets = np.array([CLASS_INDEX[ex.label] for ex in train])
        self.units = _unit_rows(np.array([sentence_vector(ex.text, table) for ex in train]))

    def __len__(self) -> int:
        return len(self.targets)

    def similarities(self, text: str) -> np.ndarray:
        """Cosine similarity to every training example (0 when either vector is zero)."""
        q = _unit_rows(sentence_vector(text, self.table))
        return self.units @ q

    def classify(self, text: str, k: int = DEFAULT_K) -> Prediction:
        if k < 1:
            raise ValueError("k must be positive")
        if k > len(self):
            raise KTooLarge(f"k={k} exceeds training set of {len(self)}")
        sims = self.similarities(text)
        order = np.lexsort((np.arange(len(sims)), -sims))[:k]
        votes = np.bincount(self.targets[order], minlength=N_CLASSES)
        mass = np.bincount(self.targets[order], weights=sims[order], minlength=N_CLASSES)
        top = votes.max()
        tied = [c for c in range(N_CLASSES) if votes[c] == top]
        # votes, then summed similarity, then class order
        winner = min(tied, key=lambda c: (-mass[c], c))
        dist = votes / k
        return Prediction(tuple(float(x) for x in dist), CLASSES[winner], float(dist[winner]))


def knn_classify(text: str, train, table: EmbeddingTable, k: int = DEFAULT_K) -> Prediction:
    return KnnIndex(train, table).classify(text, k)
