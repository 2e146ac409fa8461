import numpy as np
import pytest

from hbrkga.hyperspace import DimensionSpec, HyperSpace

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[number] = (text, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        text, outcome = _criteria[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {text}")


class StubRng:
    """Replays fixed draws for the methods the optimizers call."""

    def __init__(self, integers=(), random=(), uniform=()):
        self._integers = list(integers)
        self._random = list(random)
        self._uniform = list(uniform)

    def integers(self, high):
        v = self._integers.pop(0)
        assert 0 <= v < high
        return v

    def random(self, size=None):
        if size is None:
            return self._random.pop(0)
        out, self._random = self._random[:size], self._random[size:]
        return np.array(out)

    def uniform(self, low, high):
        v = self._uniform.pop(0)
        assert low <= v <= high
        return v


@pytest.fixture
def mixed_space():
    """The five-dimension example space: ints and floats over mixed ranges."""
    return HyperSpace([
        DimensionSpec("a", "int", 0, 100),
        DimensionSpec("b", "float", 0, 3),
        DimensionSpec("c", "int", 0, 50),
        DimensionSpec("d", "int", 0, 60),
        DimensionSpec("e", "float", -1, 1),
    ])


@pytest.fixture
def rastrigin_space():
    return HyperSpace([
        DimensionSpec("x0", "float", -5.12, 5.12),
        DimensionSpec("x1", "int", -5, 5),
        DimensionSpec("x2", "float", -5.12, 5.12),
        DimensionSpec("x3", "int", -5, 5),
        DimensionSpec("x4", "float", -5.12, 5.12),
    ])
