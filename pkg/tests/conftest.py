import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from stochgram.system import TimeInvariantLinearSystem, TimeVaryingLinearSystem

ACCEPTANCE_LINES: list[str] = []


def random_spd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return scale * (a @ a.T / n + 0.2 * np.eye(n))


def random_phi(rng, n, lo=0.6, hi=1.4):
    """Well-conditioned transition: random rotations around bounded singular values."""
    u, _ = np.linalg.qr(rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return u @ np.diag(rng.uniform(lo, hi, n)) @ v.T


def random_ltv(rng, n=None, p=None, N=None):
    n = n or int(rng.integers(1, 4))
    p = p or int(rng.integers(1, 4))
    N = int(rng.integers(1, 9)) if N is None else N
    return TimeVaryingLinearSystem(
        phi=[random_phi(rng, n) for _ in range(N)],
        c=[rng.standard_normal((p, n)) for _ in range(N + 1)],
        q=[random_spd(rng, n, 0.5) for _ in range(N)],
        r=[random_spd(rng, p, 0.5) for _ in range(N + 1)],
    )


def random_family(seed, count, N_max=8):
    rng = np.random.default_rng(seed)
    return [random_ltv(rng, N=int(rng.integers(1, N_max + 1))) for _ in range(count)]


def scalar_lti(phi=1.0, c=1.0, q=1.0, r=1.0):
    return TimeInvariantLinearSystem(phi=[[phi]], c=[[c]], q=None if q is None else [[q]], r=[[r]])


def fig2_system():
    phi = [
        np.array([[2.0, -1 + math.sin(k * math.pi / 18)], [math.cos(k * math.pi / 18), 1.0]])
        for k in range(30)
    ]
    q = np.array([[3.6e-2, 1.2e-2], [1.2e-2, 6e-2]])
    return TimeVaryingLinearSystem(phi=phi, c=[[[1.0, 0.0]]] * 31, q=[q] * 30, r=[[[0.1]]] * 31)


def fig1_system():
    q = np.array([[1e-11, -5e-18], [-5e-18, 1e-17]])
    return TimeInvariantLinearSystem(phi=[[1, -1], [0, 1]], c=[[1, 0]], q=q, r=[[2.89e-10]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fig2():
    return fig2_system()


@pytest.fixture
def fig1():
    return fig1_system()


@contextmanager
def criterion(number, title, max_seconds):
    """Record a pass/fail line for an acceptance criterion and enforce its runtime."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"[FAIL] {number:>2}. {title} ({elapsed:.2f}s): {exc!r}"[:300])
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= max_seconds:
        ACCEPTANCE_LINES.append(f"[FAIL] {number:>2}. {title} ({elapsed:.2f}s >= {max_seconds}s)")
        raise AssertionError(f"criterion {number} took {elapsed:.2f}s, limit {max_seconds}s")
    ACCEPTANCE_LINES.append(f"[PASS] {number:>2}. {title} ({elapsed:.2f}s < {max_seconds}s)")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
