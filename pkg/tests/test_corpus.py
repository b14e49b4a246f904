import pytest

from kasper.corpus import DEFAULT_TEMPLATES, ClassWithoutTemplates, CorpusSpec, generate_corpus
from kasper.intent.classes import CLASSES, Dataset, DatasetError, Example, UnknownClass


def test_default_corpus_shape():
    data = generate_corpus()
    assert len(data) == 22 * 50
    assert data.missing_classes() == []
    assert all(ex.text and ex.text == ex.text.strip() and "  " not in ex.text for ex in data)
    assert all(len(DEFAULT_TEMPLATES[c]) >= 3 for c in CLASSES)


def test_generation_is_deterministic():
    assert generate_corpus().dumps() == generate_corpus().dumps()
    assert generate_corpus(CorpusSpec(seed=1)).dumps() != generate_corpus().dumps()


def test_one_per_class():
    assert len(generate_corpus(CorpusSpec(per_class=1)).dumps().splitlines()) == 22


def test_missing_templates_rejected():
    templates = dict(DEFAULT_TEMPLATES)
    del templates["Weather"]
    with pytest.raises(ClassWithoutTemplates):
        generate_corpus(CorpusSpec(templates=templates))


def test_split_is_stratified_and_seeded():
    data = generate_corpus()
    train, held = data.split(42)
    assert (len(train), len(held)) == (880, 220)
    assert train.missing_classes() == []
    assert {c: sum(ex.label == c for ex in held) for c in CLASSES} == {c: 10 for c in CLASSES}
    again = data.split(42)
    assert again[0] == train and again[1] == held
    assert data.split(7)[1] != held


def test_dataset_file_roundtrip(tmp_path):
    data = generate_corpus(CorpusSpec(per_class=2))
    p = tmp_path / "d.tsv"
    data.save(p)
    assert Dataset.load(p) == data


def test_dataset_validation():
    with pytest.raises(UnknownClass):
        Dataset.loads("Astrology\twhat is my sign\n")
    with pytest.raises(DatasetError):
        Dataset.loads("no tab here\n")
    with pytest.raises(ValueError):
        Example("", "Weather")
    assert len(CLASSES) == 22
