import numpy as np
import pytest

from kbf._backend import HAVE_NUMBA, load_kernels

BACKENDS = ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE = []


@pytest.fixture(params=BACKENDS)
def kernels(request):
    """Both kernel modules, regardless of the backend picked at import."""
    return load_kernels(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian(rng, M):
    A = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    return 0.5 * (A + A.conj().T)


def random_pd(rng, M, shift=1.0):
    B = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    return B.conj().T @ B + shift * np.eye(M)


def random_psd_lowrank(rng, M, rank):
    B = rng.standard_normal((M, rank)) + 1j * rng.standard_normal((M, rank))
    return B @ B.conj().T


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
