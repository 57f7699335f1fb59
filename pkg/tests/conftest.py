import numpy as np
import pytest


def fd_gradient(fn, points, h=1e-4):
    """Central differences of a value function ``fn(points) -> (N,)``."""
    points = np.atleast_2d(points)
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        cols.append((fn(points + e) - fn(points - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def fd_jacobian(fn, points, h=1e-4):
    """Central differences of a vector function ``fn(points) -> (N, 3)``; result[..., i, k] = d_k fn_i."""
    points = np.atleast_2d(points)
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        cols.append((fn(points + e) - fn(points - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Record one acceptance line; the terminal summary prints them in order."""

    def _record(number, title, passed, detail):
        ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}: {detail}")
