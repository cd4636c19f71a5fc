import math
from importlib.resources import files

import pytest

DATA = files("hcinfo") / "data"


def data_path(name):
    return str(DATA / name)


def brute_entropy(probs):
    """Reference entropy: a plain loop, independent of numpy."""
    return -sum(p * math.log2(p) for p in probs if p > 0)


def brute_kl(q, p):
    return sum(a * math.log2(a / b) for a, b in zip(q, p) if a > 0)


@pytest.fixture
def tv():
    from hcinfo import ProbabilityDistribution as PD

    labels = ("a1", "a2", "a3")
    return {
        "a": PD(labels, (1 / 3, 1 / 3, 1 / 3)),
        "b": PD(labels, (0.2, 0.7, 0.1)),
        "c": PD(labels, (0.09, 0.9, 0.01)),
    }


@pytest.fixture
def tv_cost():
    from hcinfo import CostModel

    return CostModel({"a1": 1, "a2": 2, "a3": 3}, unit_step_seconds=2.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
