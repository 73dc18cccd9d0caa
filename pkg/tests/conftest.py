import numpy as np
import pytest

_ACCEPTANCE: list[tuple[str, bool | None, str]] = []


def naive_semi_norm(values, times, beta):
    """Exhaustive pair enumeration over all ordered pairs i != j, pure Python."""
    values = [float(v) for v in values]
    times = [float(t) for t in times]
    best = 0.0
    for i in range(len(values)):
        for j in range(len(values)):
            if i == j:
                continue
            r = abs(values[i] - values[j]) / abs(times[i] - times[j]) ** beta
            if r > best:
                best = r
    return best


def random_window(rng, m):
    """Random-walk values on sorted distinct times drawn from a 1/1000 grid."""
    values = np.cumsum(rng.normal(size=m))
    times = np.sort(rng.choice(1000, size=m, replace=False) + 1) / 1000.0
    return values, times


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"{status}  {name}: {detail}")
