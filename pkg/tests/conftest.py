import numpy as np
import pytest

from cosserat_lh.material import IsotropicQuadraticMaterial


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def stable():
    return IsotropicQuadraticMaterial(mu=1.0, mu_c=0.5, lam=0.0, a1=1.0, a2=1.0, a3=1.0)


@pytest.fixture
def generic():
    """Distinct positive moduli so no two terms can be confused."""
    return IsotropicQuadraticMaterial(mu=1.3, mu_c=0.4, lam=0.7, a1=0.9, a2=0.6, a3=1.1)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion, then assert it."""
    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
