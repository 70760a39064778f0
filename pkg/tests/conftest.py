import numpy as np
import pytest
from hypothesis import settings

from idemkit.idempotent import random_idempotent

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

# [[1, 1], [0, 0]] is the smallest non-projection idempotent; many hand-derived
# values below refer to it.
Q2 = np.array([[1.0, 1.0], [0.0, 0.0]], dtype=complex)
R2 = np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_cases(count, seed, n_max=12, a_range=(0.1, 5.0)):
    """Deterministic batch of (n, k, a, Idempotent)."""
    g = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(g.integers(2, n_max + 1))
        k = int(g.integers(1, n))
        a = float(g.uniform(*a_range))
        out.append((n, k, a, random_idempotent(n, k, a, rng=g)))
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
