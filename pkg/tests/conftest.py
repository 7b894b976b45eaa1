import functools

import numpy as np
import pytest
from scipy.stats import unitary_group

MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_label(label: str) -> np.ndarray:
    """Independent Kronecker construction, leftmost character = first factor."""
    return functools.reduce(np.kron, [MATS[c] for c in label], np.eye(1, dtype=complex))


def random_unitary(n: int, rng) -> np.ndarray:
    return unitary_group.rvs(1 << n, random_state=rng)


def random_hermitian(n: int, rng, scale: float = 1.0) -> np.ndarray:
    d = 1 << n
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (A + A.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
