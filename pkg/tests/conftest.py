import numpy as np
import pytest

from clonecoh.analysis import consumption_interval

BETA_GRID = np.linspace(0.0, 1.0, 101)
INV_SQRT2 = 1 / np.sqrt(2)

_criteria: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20161018)


@pytest.fixture(scope="session")
def intervals():
    """Consumption intervals for the four named (pipeline, machine) cases, computed once."""
    return {
        (p, m): consumption_interval(p, m, tol=1e-10)
        for p in ("c2d", "d2c")
        for m in ("ouqc", "pc")
    }


@pytest.fixture(scope="session")
def criterion_log():
    return _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda k: int(k.split()[0])):
        ok, detail = _criteria[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")
