"""Intent taxonomy and labelled datasets."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CLASSES: tuple[str, ...] = (
    "Art and Beauty",
    "Business and Finance",
    "Communication",
    "Connected Car",
    "Food and Drink",
    "Games, Trivia, and Accessories",
    "Health and Fitness",
    "Interests",
    "Knowledge",
    "Lifestyle",
    "Movies and TV Shows",
    "Music and Audio",
    "News",
    "Novelty and Humour",
    "Problem Solving",
    "Productivity",
    "Shopping",
    "Social",
    "Sports",
    "Travel and Transportation",
    "Utilities",
    "Weather",
)
N_CLASSES = len(CLASSES)
CLASS_INDEX = {c: i for i, c in enumerate(CLASSES)}


class DatasetError(ValueError):
    pass


class UnknownClass(DatasetError):
    pass


@dataclass(frozen=True)
class Example:
    text: str
    label: str

    def __post_init__(self):
        if not self.text.strip():
            raise DatasetError("example text must be non-empty")
        if self.label not in CLASS_INDEX:
            raise UnknownClass(f"unknown intent class {self.label!r}")

    @property
    def target(self) -> int:
        return CLASS_INDEX[self.label]


class Dataset(list):
    """A list of :class:`Example` with file I/O and a seeded stratified split."""

    def labels(self) -> set[str]:
        return {ex.label for ex in self}

    def texts(self) -> list[str]:
        return [ex.text for ex in self]

    def missing_classes(self) -> list[str]:
        have = self.labels()
        return [c for c in CLASSES if c not in have]

    def split(self, seed: int, train_fraction: float = 0.8) -> tuple["Dataset", "Dataset"]:
        """Shuffle each class with ``seed`` and cut it at ``train_fraction``.

        Every class present here keeps at least one example in train.
        """
        rng = random.Random(seed)
        train, held = Dataset(), Dataset()
        for c in CLASSES:
            members = [ex for ex in self if ex.label == c]
            if not members:
                continue
            rng.shuffle(members)
            n_train = max(1, round(len(members) * train_fraction))
            train.extend(members[:n_train])
            held.extend(members[n_train:])
        return train, held

    def dumps(self) -> str:
        return "".join(f"{ex.label}\t{ex.text}\n" for ex in self)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "Dataset":
        out = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            label, sep, utterance = line.partition("\t")
            if not sep:
                raise DatasetError(f"{source}:{lineno}: expected '<label>\\t<utterance>'")
            if label not in CLASS_INDEX:
                raise UnknownClass(f"{source}:{lineno}: unknown intent class {label!r}")
            out.append(Example(utterance, label))
        return out

    @classmethod
    def load(cls, path) -> "Dataset":
        return cls.loads(Path(path).read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class Prediction:
    distribution: tuple[float, ...]
    label: str
    confidence: float

    @classmethod
    def from_distribution(cls, dist) -> "Prediction":
        d = np.asarray(dist, dtype=np.float64)
        if d.shape != (N_CLASSES,):
            raise ValueError(f"distribution must have {N_CLASSES} entries")
        i = int(np.argmax(d))  # first maximum: ties go to the earlier class
        return cls(tuple(float(x) for x in d), CLASSES[i], float(d[i]))
