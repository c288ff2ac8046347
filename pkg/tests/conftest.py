import numpy as np
import pytest

from dictsel import _kernels


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    monkeypatch.setattr(_kernels, "active", _kernels.get_kernels(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def unit_columns(rng, m, n):
    A = rng.standard_normal((m, n))
    return A / np.linalg.norm(A, axis=0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda ln: int(ln.split()[1][1:])):
        terminalreporter.write_line(line)
