import pytest

from fareywalk.walk import WalkConfig, WalkMeasure, run_ensemble

SEED = 1
W = 100_000

_results = {}
_ensembles = {}


def record(criterion, passed, detail=""):
    _results[criterion] = (bool(passed), detail)


def ensemble(steps, workers=1, seed=SEED, walks=W):
    """Farey-measure ensemble, cached for the whole session."""
    key = (steps, workers, seed, walks)
    if key not in _ensembles:
        cfg = WalkConfig(steps=steps, walks=walks, seed=seed)
        _ensembles[key] = run_ensemble(WalkMeasure.farey(), cfg, workers=workers)
    return _ensembles[key]


@pytest.fixture(scope="session")
def farey120():
    return ensemble(120)


@pytest.fixture(scope="session")
def farey60():
    return ensemble(60)


@pytest.fixture
def recorder():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        ok, detail = _results[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
