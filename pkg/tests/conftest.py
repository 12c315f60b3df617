from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from aggnash.core import ActionGraphGame

GOLDEN = Path(__file__).parent / "golden"


def pennies_game() -> ActionGraphGame:
    """Two agents; agent 0 (strategies 0=H, 1=T) wants to match, agent 1 (2=H, 3=T) to mismatch."""
    edges = [(2, 0), (3, 1), (0, 2), (1, 3)]
    labels = ["mH", "mT", "xH", "xT"]

    def u(s, c):
        if s in (0, 1):
            return Fraction(c[s + 2])
        return Fraction(1 - c[s - 2])

    return ActionGraphGame.from_function([(1, [0, 1]), (1, [2, 3])], edges, labels, u)


def coordination_game() -> ActionGraphGame:
    """Two agents on the same pair {0, 1}; payoff 1 iff both pick the same strategy."""
    return ActionGraphGame.from_function([(2, [0, 1])], [(0, 0), (1, 1)], ["a", "b"],
                                         lambda s, c: Fraction(int(c[s] == 2)))


def anticoordination_game(n: int = 2) -> ActionGraphGame:
    """Symmetric two-strategy tree game: f pays D(t)/n and t pays D(f)/n."""
    return ActionGraphGame.from_function([(n, [0, 1])], [(0, 1), (1, 0)], ["f", "t"],
                                         lambda s, c: Fraction(c[1 - s], n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def golden():
    return GOLDEN


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def record(request, capsys):
    """record(number, ok, detail) prints one PASS/FAIL line and keeps it for the summary."""

    def _record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        request.config.acceptance_lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return _record
