import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n_qubits):
    from hqdmft.qsim import QuantumState

    vec = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return QuantumState.from_vector(vec / np.linalg.norm(vec))


@pytest.fixture(scope="session")
def dmft_runs():
    """Default-configuration loop for U = 0, 1, 2, started from V0 = 0.5."""
    from hqdmft.dmft import DmftConfig, dmft_iterate

    return {U: dmft_iterate(DmftConfig.for_U(U)) for U in (0.0, 1.0, 2.0)}


@pytest.fixture(scope="session")
def scan_minima():
    from hqdmft.dmft import DmftConfig, scan_minimizer

    return {U: scan_minimizer(DmftConfig.for_U(U)) for U in (0.0, 1.0, 2.0)}


_CRITERIA: dict = {}
_SESSION_START = [0.0]


def pytest_sessionstart(session):
    import time

    _SESSION_START[0] = time.perf_counter()


@pytest.fixture
def criterion():
    """Record the verdict of one acceptance criterion for the summary table."""

    def record(number: int, ok: bool, detail: str):
        _CRITERIA[number] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    import time

    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    elapsed = time.perf_counter() - _SESSION_START[0]
    tr.write_line(f"suite wall time: {elapsed:.1f} s ({'within' if elapsed < 300 else 'over'} the 300 s budget)")
