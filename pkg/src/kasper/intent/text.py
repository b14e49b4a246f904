"""Tokenization and word-embedding tables."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_DIM = 50

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, then split on every run of non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


def normalize(text: str) -> str:
    return " ".join(tokenize(text))


class EmbeddingError(ValueError):
    pass


class MalformedLine(EmbeddingError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno


class InconsistentDimension(EmbeddingError):
    pass


@dataclass(frozen=True)
class EmbeddingTable:
    """Frozen token -> vector table; unknown tokens map to the zero vector."""

    vocab: dict[str, int]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != len(self.vocab):
            raise EmbeddingError(f"matrix shape {m.shape} does not match vocabulary of {len(self.vocab)}")
        if not np.all(np.isfinite(m)):
            raise EmbeddingError("embedding rows must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def lookup(self, token: str) -> np.ndarray:
        i = self.vocab.get(token)
        if i is None:
            return np.zeros(self.dim)
        return self.matrix[i]

    def embed(self, tokens) -> np.ndarray:
        """Stack token vectors into an (L, D) array."""
        out = np.zeros((len(tokens), self.dim))
        for r, tok in enumerate(tokens):
            i = self.vocab.get(tok)
            if i is not None:
                out[r] = self.matrix[i]
        return out

    def embed_text(self, text: str) -> np.ndarray:
        return self.embed(tokenize(text))

    def tokens(self) -> list[str]:
        return sorted(self.vocab, key=self.vocab.__getitem__)


def load_embeddings(path) -> EmbeddingTable:
    """Read the whitespace-separated text layout: ``token v1 v2 ... vD`` per line."""
    vocab: dict[str, int] = {}
    rows: list[list[float]] = []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 2:
                raise MalformedLine(lineno, "token without values")
            token, raw = parts[0], parts[1:]
            try:
                vec = [float(x) for x in raw]
            except ValueError:
                raise MalformedLine(lineno, "non-numeric value") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise InconsistentDimension(f"line {lineno}: {len(vec)} values, expected {dim}")
            if token in vocab:
                raise MalformedLine(lineno, f"duplicate token {token!r}")
            vocab[token] = len(rows)
            rows.append(vec)
    if dim is None:
        raise EmbeddingError(f"{path}: no embeddings found")
    return EmbeddingTable(vocab, np.array(rows, dtype=np.float64))


DEFAULT_RANDOM_SCALE = 0.5


def random_embeddings(texts, dim: int = DEFAULT_DIM, seed: int = 0,
                      scale: float = DEFAULT_RANDOM_SCALE) -> EmbeddingTable:
    """Seeded table over the vocabulary of ``texts``, uniform in [-scale, scale].

    The default keeps entries on the order of pre-trained vectors; the
    word2vec-style ``0.5 / dim`` is too small for frozen inputs to train on.
    """
    vocab_list = sorted({tok for t in texts for tok in tokenize(t)})
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-scale, scale, size=(len(vocab_list), dim))
    return EmbeddingTable({tok: i for i, tok in enumerate(vocab_list)}, matrix)


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tok in table.tokens():
            # repr round-trips float64 exactly
            vals = " ".join(repr(float(v)) for v in table.lookup(tok))
            fh.write(f"{tok} {vals}\n")
