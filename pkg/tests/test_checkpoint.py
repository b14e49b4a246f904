import numpy as np
import pytest

from kasper.corpus import CorpusSpec, generate_corpus
from kasper.intent import checkpoint
from kasper.intent.checkpoint import AlgorithmUnavailable, CheckpointError, ModelBundle
from kasper.intent.pipeline import compare, format_comparison, prepare, train_bundle
from kasper.intent.training import TrainConfig


@pytest.fixture(scope="module")
def small():
    data = generate_corpus(CorpusSpec(per_class=6, seed=1))
    train, held, table = prepare(data, 1, dim=8)
    bundle, timings = train_bundle(train, table, ("cnn", "rnn"), TrainConfig(epochs=2, seed=1, filters=3, hidden=4))
    return bundle, held, timings


def test_roundtrip_is_bit_exact(small, tmp_path):
    bundle, _, _ = small
    path = tmp_path / "m.ckpt"
    checkpoint.save(bundle, path)
    back = checkpoint.load(path)
    assert back.table.tokens() == bundle.table.tokens()
    assert np.array_equal(back.table.matrix, bundle.table.matrix)
    for kind, model in bundle.models.items():
        for name, arr in model.params.items():
            assert np.array_equal(back.models[kind].params[name], arr)
            assert back.models[kind].params[name].dtype == np.float64
    assert back.configs == bundle.configs
    assert [(e.text, e.label) for e in back.exemplars] == [(e.text, e.label) for e in bundle.exemplars]
    assert (back.knn_k, back.seed) == (bundle.knn_k, bundle.seed)
    assert checkpoint.dumps(back) == checkpoint.dumps(bundle)


def test_loaded_bundle_predicts_identically(small):
    bundle, held, _ = small
    back = checkpoint.loads(checkpoint.dumps(bundle))
    for ex in held[:20]:
        for algo in ("cnn", "rnn", "knn", "fuzzy"):
            assert back.classify(ex.text, algo) == bundle.classify(ex.text, algo)


def test_header_layout(small):
    raw = checkpoint.dumps(small[0])
    assert raw[:8] == b"KASPERCK"
    assert int.from_bytes(raw[8:12], "little") == 1


def test_corrupt_inputs():
    with pytest.raises(CheckpointError):
        checkpoint.loads(b"NOTACKPT" + bytes(8))


def test_truncated(small):
    raw = checkpoint.dumps(small[0])
    with pytest.raises(CheckpointError):
        checkpoint.loads(raw[:-16])


def test_missing_model(small):
    bundle = small[0]
    only_knn = ModelBundle(bundle.table, bundle.exemplars)
    assert only_knn.available() == ["knn", "fuzzy"]
    with pytest.raises(AlgorithmUnavailable):
        only_knn.classify("hello", "cnn")


def test_comparison_table_format(small):
    bundle, held, timings = small
    text = format_comparison(compare(bundle, held, timings))
    lines = text.splitlines()
    assert lines[0].split()[0] == "Algorithm"
    assert [ln.split("  ")[0] for ln in lines[1:5]] == [
        "Fuzzy DP matching", "K-nearest neighbours", "Convolutional NN", "Recurrent NN"]
    assert lines[-1].startswith("RNN/CNN training time ratio")
