import numpy as np
import pytest

from topochain import ChainSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pump_spec():
    """Three-site chain of the pumping experiment: 18 qubits, g0 = g1, theta = pi."""
    return ChainSpec(p=3, N=6, g0=1.0, g1=1.0, theta=np.pi)


def random_hermitian(rng, n, scale=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A + A.conj().T) / 2


def random_state(rng, n):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return psi / np.linalg.norm(psi)


# acceptance criteria append (label, passed, detail) here; printed after the run
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
