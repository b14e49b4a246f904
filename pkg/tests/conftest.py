import time
from pathlib import Path

import pytest

from kasper import data_path
from kasper.corpus import generate_corpus
from kasper.intent import checkpoint
from kasper.intent.pipeline import prepare, train_bundle
from kasper.intent.training import TrainConfig

FIXTURES = Path(__file__).parent / "fixtures"
SCENARIOS = Path(str(data_path("scenarios")))

_acceptance: dict[str, str] = {}


@pytest.fixture(scope="session")
def corpus():
    return generate_corpus()


@pytest.fixture(scope="session")
def trained(corpus, tmp_path_factory):
    """CNN and RNN bundle on the default corpus and split, with training wall-clock."""
    t0 = time.perf_counter()
    train, held, table = prepare(corpus, 42)
    bundle, timings = train_bundle(train, table, ("cnn", "rnn"), TrainConfig(seed=42))
    elapsed = time.perf_counter() - t0
    path = tmp_path_factory.mktemp("ckpt") / "bundle.ckpt"
    checkpoint.save(bundle, path)
    return {"bundle": bundle, "held": held, "train": train, "timings": timings,
            "seconds": elapsed, "path": path}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    label = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _acceptance[label] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(f"{_acceptance[label]}  {label}")
