import numpy as np
import pytest

from quadpose.linalg import Quad2, Quad3

_CRITERIA: list[str] = []


@pytest.fixture
def report_criterion():
    """Record a one-line acceptance verdict, echoed in the terminal summary."""

    def _report(number: int, title: str, ok: bool, detail: str) -> None:
        _CRITERIA.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}")

    return _report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def frontal_incidents():
    return Quad3.from_points((-1, 1, 2), (1, 1, 2), (1, -1, 2), (-1, -1, 2))


@pytest.fixture
def frontal_square():
    return Quad2.from_points((-1, 1), (1, 1), (1, -1), (-1, -1))


@pytest.fixture
def rng():
    return np.random.default_rng(20200518)
