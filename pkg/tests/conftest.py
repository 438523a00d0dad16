from functools import lru_cache

import pytest

from gapkit.kernel import EnsembleParams
from gapkit.painleve import integrate_trace

RESULTS = []


@lru_cache(maxsize=None)
def cached_trace(alpha, b, t_max, tol, t0=0.05):
    return integrate_trace(EnsembleParams(alpha, b), t0, t_max, tol)


@pytest.fixture
def trace_of():
    return cached_trace


def record(label, ok, detail):
    line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
