import itertools

import numpy as np
import pytest


def brute_aperiodic(x):
    n = len(x)
    return np.array([sum(np.conj(x[i]) * x[i + k] for i in range(n - k)) for k in range(n)])


def brute_periodic(x):
    n = len(x)
    return np.array([sum(np.conj(x[i]) * x[(i + k) % n] for i in range(n)) for k in range(n)])


def brute_dft(n):
    p, q = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(-2j * np.pi * p * q / n) / np.sqrt(n)


def exact_expected_sq_acf(u, points, probs, periodic):
    """E|r_k|^2 by enumerating every symbol vector of a small block."""
    n = u.shape[0]
    out = np.zeros(n)
    for combo in itertools.product(range(len(points)), repeat=n):
        s = np.asarray(points)[list(combo)]
        w = np.prod(np.asarray(probs)[list(combo)])
        x = u @ s
        r = brute_periodic(x) if periodic else brute_aperiodic(x)
        out += w * np.abs(r) ** 2
    return out


def empirical_moment_matrix(symbols):
    """Average of vec(s s^H) vec(s s^H)^H over rows of ``symbols`` (draws x n)."""
    n = symbols.shape[1]
    # vec(s s^H) index m*n + p holds s_m^* s_p
    v = (symbols.conj()[:, :, None] * symbols[:, None, :]).reshape(len(symbols), n * n)
    return (v.T @ v.conj()).real / len(symbols)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
