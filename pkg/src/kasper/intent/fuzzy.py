"""Edit-distance matching against labelled exemplars."""

from __future__ import annotations

import numpy as np

from kasper.intent.classes import CLASS_INDEX, N_CLASSES, Prediction
from kasper.intent.text import normalize


class EmptyQuery(ValueError):
    pass


class EmptyExemplars(ValueError):
    pass


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute), two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def encode(candidates: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Pack strings into a padded code-point matrix plus their lengths."""
    lens = np.array([len(c) for c in candidates], dtype=np.int64)
    width = int(lens.max()) if len(candidates) else 0
    codes = np.full((len(candidates), width), -1, dtype=np.int32)
    for r, c in enumerate(candidates):
        codes[r, :len(c)] = [ord(ch) for ch in c]
    return codes, lens


def levenshtein_many(query: str, candidates, _encoded=None) -> np.ndarray:
    """Distances from ``query`` to every candidate, one DP row per query character.

    Same recurrence as :func:`levenshtein`, evaluated for all candidates at
    once; padding beyond a candidate's length never feeds back into the
    cells that are read out.
    """
    codes, lens = _encoded if _encoded is not None else encode(list(candidates))
    n, width = codes.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    cols = np.arange(width + 1, dtype=np.int32)
    prev = np.broadcast_to(cols, (n, width + 1)).copy()
    x = np.empty_like(prev)
    for i, ch in enumerate(query, 1):
        x[:, 0] = i
        # deletion / substitution from the previous row
        np.minimum(prev[:, 1:] + 1, prev[:, :-1] + (codes != ord(ch)), out=x[:, 1:])
        # insertion chain along the row: cur[j] = min_k<=j x[k] + (j - k)
        x -= cols
        prev = np.minimum.accumulate(x, axis=1)
        prev += cols
    return prev[np.arange(n), lens].astype(np.int64)


def similarity(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


class FuzzyIndex:
    """Exemplars pre-normalized once, queried many times."""

    def __init__(self, exemplars):
        exemplars = list(exemplars)
        if not exemplars:
            raise EmptyExemplars("fuzzy matching needs at least one exemplar")
        self.norms = [normalize(ex.text) for ex in exemplars]
        self._encoded = encode(self.norms)
        self.lengths = self._encoded[1]
        self.targets = np.array([CLASS_INDEX[ex.label] for ex in exemplars])

    def similarities(self, text: str) -> np.ndarray:
        """Similarity of ``text`` to every exemplar, in exemplar order."""
        q = normalize(text)
        longest = np.maximum(self.lengths, len(q))
        return np.where(longest > 0, 1.0 - levenshtein_many(q, self.norms, self._encoded) / np.maximum(longest, 1), 1.0)

    def classify(self, text: str) -> Prediction:
        if not text or not text.strip():
            raise EmptyQuery("empty query")
        q = normalize(text)
        best = np.full(N_CLASSES, -1.0)
        np.maximum.at(best, self.targets, self.similarities(q))
        present = best >= 0
        best = np.where(present, best, 0.0)
        total = best.sum()
        if total > 0:
            dist = best / total
        else:
            dist = present / present.sum()
        return Prediction.from_distribution(dist)


def fuzzy_classify(text: str, exemplars) -> Prediction:
    return FuzzyIndex(exemplars).classify(text)
