import numpy as np
import pytest


def random_psd(n, seed, complex_=True, rank=None):
    rng = np.random.default_rng(seed)
    k = rank or n
    X = rng.standard_normal((k, n))
    if complex_:
        X = X + 1j * rng.standard_normal((k, n))
    return X.conj().T @ X


@pytest.fixture
def psd():
    return random_psd


ACCEPTANCE = []


def record(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
