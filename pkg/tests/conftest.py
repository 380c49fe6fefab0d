from contextlib import contextmanager

import numpy as np
import pytest

# Acceptance criteria record one line each here; printed at the end of the run.
ACCEPTANCE_LINES = []


def record_acceptance(label, passed, detail=""):
    ACCEPTANCE_LINES.append((label, bool(passed), detail))


@contextmanager
def criterion(label):
    """Collect the verdict of one acceptance criterion.

    The body fills ``result["passed"]`` and ``result["detail"]``; an exception
    records a failing line carrying the exception text and is re-raised.
    """
    result = {"passed": False, "detail": ""}
    try:
        yield result
    except BaseException as exc:
        record_acceptance(label, False, f"{result['detail']} [{type(exc).__name__}: {exc}]".strip())
        raise
    record_acceptance(label, result["passed"], result["detail"])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda r: int(r[0].split()[0][2:])):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {label}  {detail}")


def complex_gauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_matrix(rng, m, n, rank, complex_=False):
    """Rank-`rank` m x n matrix from Gaussian factors (independent of the package generators)."""
    draw = complex_gauss if complex_ else (lambda r, s: r.standard_normal(s))
    if rank == 0:
        return np.zeros((m, n), dtype=complex if complex_ else float)
    return draw(rng, (m, rank)) @ draw(rng, (rank, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
