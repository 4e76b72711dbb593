import numpy as np
import pytest

from egf import make_interval_grid

_CRITERIA = []


def record_criterion(number, title, ok, detail):
    """Remember an acceptance outcome so the terminal summary can list all of them."""
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    _CRITERIA.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA, key=lambda t: t[0]):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def unit_grid():
    return make_interval_grid(0.0, 1.0, 201)


def random_w_orthonormal(grid, k, rng):
    """Random modes with ``Phi^T W Phi = I`` on ``grid``."""
    sw = grid.sqrt_weights
    Q, _ = np.linalg.qr(rng.standard_normal((grid.size, k)))
    return Q / sw[:, None]
