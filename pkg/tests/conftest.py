import sys

import numpy as np
import pytest

from multisqueeze.linalg import random_unitary
from multisqueeze.symplectic import random_kernel
from multisqueeze.tensor import fold


def random_symmetric(n, rng, degenerate=False):
    """Complex symmetric matrix; optionally with a forced repeated singular value."""
    if degenerate:
        q = random_unitary(n, rng)
        d = np.sort(rng.uniform(0.1, 2.0, n))[::-1]
        d[1] = d[0]
        return q @ np.diag(d) @ q.T
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.T)


def random_tensor_kernel(n_spectral, n_spatial, rng, r_max=0.8):
    return fold(random_kernel(n_spectral * n_spatial, rng, r_max=r_max), n_spectral, n_spatial)


def random_symmetric_tensor(n_spectral, n_spatial, rng):
    n = n_spectral * n_spatial
    return random_symmetric(n, rng).reshape(n_spectral, n_spatial, n_spectral, n_spatial)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
