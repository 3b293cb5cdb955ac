import itertools

import numpy as np
import pytest

from tqme.linalg import RandomStream


@pytest.fixture
def stream():
    return RandomStream(20240917)


def permanent(a):
    """Brute-force permanent; only for tiny matrices."""
    n = a.shape[0]
    return sum(np.prod([a[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))


def two_photon_probabilities(t, in_modes):
    """Output pair probabilities for photons entering distinct modes ``in_modes``.

    Textbook permanent formula, kept independent of the coefficient-matrix
    representation used by the engine.
    """
    i, j = in_modes
    m = t.shape[0]
    out = np.zeros((m, m))
    for k in range(m):
        for l in range(k, m):
            sub = t[np.ix_([k, l], [i, j])]
            amp = permanent(sub)
            out[k, l] = abs(amp) ** 2 / (2.0 if k == l else 1.0)
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
