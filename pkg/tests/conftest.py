"""Shared fixtures and flat factories for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from flatcluster import Flat

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    """Collect one verdict line per acceptance check; they are replayed in
    the terminal summary because passing tests swallow their stdout."""
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_flat(rng: np.random.Generator, d: int, k: int) -> Flat:
    return Flat(rng.standard_normal(d), rng.standard_normal((k, d)))


def random_rotation(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def two_ball_centers(d: int, separation: float) -> np.ndarray:
    """(2, d) centers at +-separation/2 on the first axis."""
    centers = np.zeros((2, d))
    centers[0, 0] = separation / 2.0
    centers[1, 0] = -separation / 2.0
    return centers


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240816)
