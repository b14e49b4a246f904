"""Model bundles and their on-disk checkpoint container.

Layout (all integers little-endian)::

    offset 0   8 bytes   magic  b"KASPERCK"
    offset 8   uint32    format version (currently 1)
    offset 12  uint32    header length H in bytes
    offset 16  H bytes   UTF-8 JSON header, keys sorted, no whitespace
    16 + H     ...       array payload: raw float64 ('<f8'), C order,
                         concatenated in the order of header["arrays"]

The header holds everything that is not a float array: model kinds and
configs, the embedding vocabulary (row order), the exemplar set used by the
KNN and fuzzy classifiers, and one ``{"name", "shape", "offset"}`` entry per
array (offset counted in bytes from the start of the payload). Writing the
same bundle twice produces identical bytes, and loading restores every
array bit for bit.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from kasper.intent.classes import Dataset, Example, Prediction
from kasper.intent.fuzzy import FuzzyIndex
from kasper.intent.knn import DEFAULT_K, KnnIndex
from kasper.intent.nets import CnnModel, Model, RnnModel, predict_array
from kasper.intent.text import EmbeddingTable

MAGIC = b"KASPERCK"
FORMAT_VERSION = 1
ALGORITHMS = ("cnn", "rnn", "knn", "fuzzy")


class CheckpointError(ValueError):
    pass


class AlgorithmUnavailable(CheckpointError):
    pass


@dataclass
class ModelBundle:
    """Everything the brain needs to classify text with any of the four algorithms."""

    table: EmbeddingTable
    exemplars: Dataset
    models: dict[str, Model] = field(default_factory=dict)
    configs: dict[str, dict] = field(default_factory=dict)
    knn_k: int = DEFAULT_K
    seed: int = 0

    def __post_init__(self):
        self._knn: KnnIndex | None = None
        self._fuzzy: FuzzyIndex | None = None

    def available(self) -> list[str]:
        return [a for a in ALGORITHMS if a in self.models or a in ("knn", "fuzzy")]

    def classify(self, text: str, algo: str = "cnn") -> Prediction:
        if algo in ("cnn", "rnn"):
            model = self.models.get(algo)
            if model is None:
                raise AlgorithmUnavailable(f"checkpoint has no {algo} model")
            return predict_array(model, self.table.embed_text(text))
        if algo == "knn":
            if self._knn is None:
                self._knn = KnnIndex(self.exemplars, self.table)
            return self._knn.classify(text, min(self.knn_k, len(self._knn)))
        if algo == "fuzzy":
            if self._fuzzy is None:
                self._fuzzy = FuzzyIndex(self.exemplars)
            return self._fuzzy.classify(text)
        raise AlgorithmUnavailable(f"unknown algorithm {algo!r}")


def _model_header(model: Model, config: dict) -> dict:
    if isinstance(model, CnnModel):
        shape = {"dim": model.dim, "filters": model.filters, "widths": list(model.widths)}
    else:
        shape = {"dim": model.dim, "hidden": model.hidden}
    return {"kind": model.kind, "shape": shape, "config": config, "params": sorted(model.params)}


def dumps(bundle: ModelBundle) -> bytes:
    arrays: list[tuple[str, np.ndarray]] = [("embeddings", bundle.table.matrix)]
    models = {}
    for name in sorted(bundle.models):
        model = bundle.models[name]
        models[name] = _model_header(model, bundle.configs.get(name, {}))
        for p in sorted(model.params):
            arrays.append((f"{name}/{p}", model.params[p]))

    entries, offset = [], 0
    for name, arr in arrays:
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset})
        offset += arr.size * 8
    header = {
        "arrays": entries,
        "exemplars": [[ex.label, ex.text] for ex in bundle.exemplars],
        "knn_k": bundle.knn_k,
        "models": models,
        "seed": bundle.seed,
        "vocab": bundle.table.tokens(),
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for _, a in arrays)
    return MAGIC + struct.pack("<II", FORMAT_VERSION, len(head)) + head + payload


def loads(data: bytes) -> ModelBundle:
    if data[:8] != MAGIC:
        raise CheckpointError("not a kasper checkpoint (bad magic)")
    version, hlen = struct.unpack("<II", data[8:16])
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    header = json.loads(data[16:16 + hlen].decode("utf-8"))
    payload = memoryview(data)[16 + hlen:]

    arrays = {}
    for e in header["arrays"]:
        count = int(np.prod(e["shape"], dtype=np.int64))
        end = e["offset"] + count * 8
        if end > len(payload):
            raise CheckpointError(f"truncated checkpoint while reading {e['name']}")
        arrays[e["name"]] = np.frombuffer(payload[e["offset"]:end], dtype="<f8").astype(np.float64).reshape(e["shape"])

    vocab = {tok: i for i, tok in enumerate(header["vocab"])}
    table = EmbeddingTable(vocab, arrays["embeddings"])
    models: dict[str, Model] = {}
    configs = {}
    for name, m in header["models"].items():
        params = {p: arrays[f"{name}/{p}"].copy() for p in m["params"]}
        shape = m["shape"]
        if m["kind"] == "cnn":
            models[name] = CnnModel(shape["dim"], shape["filters"], params, tuple(shape["widths"]))
        elif m["kind"] == "rnn":
            models[name] = RnnModel(shape["dim"], shape["hidden"], params)
        else:
            raise CheckpointError(f"unknown model kind {m['kind']!r}")
        configs[name] = m["config"]
    exemplars = Dataset(Example(text, label) for label, text in header["exemplars"])
    return ModelBundle(table, exemplars, models, configs, header["knn_k"], header["seed"])


def save(bundle: ModelBundle, path) -> None:
    Path(path).write_bytes(dumps(bundle))


def load(path) -> ModelBundle:
    return loads(Path(path).read_bytes())
