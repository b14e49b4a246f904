"""Data preparation, bundle training and the four-way classifier comparison."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

from kasper.intent.checkpoint import ALGORITHMS, ModelBundle
from kasper.intent.classes import Dataset
from kasper.intent.knn import DEFAULT_K
from kasper.intent.text import DEFAULT_DIM, EmbeddingTable, load_embeddings, random_embeddings
from kasper.intent.training import EvalResult, TrainConfig, evaluate, train_model

ALGO_NAMES = {
    "fuzzy": "Fuzzy DP matching",
    "knn": "K-nearest neighbours",
    "cnn": "Convolutional NN",
    "rnn": "Recurrent NN",
}
REPORT_ORDER = ("fuzzy", "knn", "cnn", "rnn")


def prepare(dataset: Dataset, seed: int, embeddings=None, dim: int = DEFAULT_DIM
            ) -> tuple[Dataset, Dataset, EmbeddingTable]:
    """Split ``dataset`` and load (or seed) the embedding table from the train side."""
    train, held = dataset.split(seed)
    if embeddings is None:
        table = random_embeddings(train.texts(), dim, seed)
    elif isinstance(embeddings, EmbeddingTable):
        table = embeddings
    else:
        table = load_embeddings(embeddings)
    return train, held, table


def train_bundle(train: Dataset, table: EmbeddingTable, kinds=("cnn",),
                 config: TrainConfig = TrainConfig(), knn_k: int = DEFAULT_K
                 ) -> tuple[ModelBundle, dict[str, float]]:
    """Train the requested neural models; returns the bundle and wall-clock seconds per trainer."""
    models, configs, timings = {}, {}, {}
    for kind in kinds:
        t0 = time.perf_counter()
        models[kind] = train_model(kind, train, table, config)
        timings[kind] = time.perf_counter() - t0
        cfg = asdict(config)
        cfg["learning_rate"] = config.rate_for(kind)
        configs[kind] = cfg
    return ModelBundle(table, train, models, configs, knn_k, config.seed), timings


@dataclass
class ComparisonRow:
    algo: str
    result: EvalResult
    train_seconds: float | None = None


def compare(bundle: ModelBundle, held: Dataset, timings: dict[str, float] | None = None
            ) -> list[ComparisonRow]:
    timings = timings or {}
    rows = []
    for algo in REPORT_ORDER:
        if algo not in bundle.available():
            continue
        result = evaluate(lambda text: bundle.classify(text, algo), held)
        rows.append(ComparisonRow(algo, result, timings.get(algo)))
    return rows


def format_comparison(rows: list[ComparisonRow]) -> str:
    lines = [f"{'Algorithm':<24} {'Accuracy':>9} {'Correct':>9} {'Train time':>11}"]
    for r in rows:
        t = "-" if r.train_seconds is None else f"{r.train_seconds:.1f} s"
        acc = f"{100 * r.result.accuracy:.2f}%"
        lines.append(f"{ALGO_NAMES[r.algo]:<24} {acc:>9} {r.result.correct:>4}/{r.result.total:<4} {t:>11}")
    cnn = next((r for r in rows if r.algo == "cnn"), None)
    rnn = next((r for r in rows if r.algo == "rnn"), None)
    if cnn and rnn and cnn.train_seconds and rnn.train_seconds:
        lines.append(f"RNN/CNN training time ratio: {rnn.train_seconds / cnn.train_seconds:.2f}x")
    return "\n".join(lines)


__all__ = ["ALGORITHMS", "prepare", "train_bundle", "compare", "format_comparison", "ComparisonRow"]
