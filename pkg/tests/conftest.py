import numpy as np
import pytest

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_null(rng, p, q):
    """Random null vector of the standard form: unit vectors in both blocks."""
    u = rng.normal(size=p)
    v = rng.normal(size=q)
    return np.concatenate([u / np.linalg.norm(u), v / np.linalg.norm(v)])


def circle_lift(theta):
    return np.array([np.cos(theta), np.sin(theta), 1.0])
