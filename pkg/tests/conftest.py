import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from riesz_gauss import DiscretizedSet, RieszParams, assemble, build_set

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

NEWTON = RieszParams(3, 2.0)
RIESZ = RieszParams(3, 1.5)


def cloud(points, boundary=None):
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    bd = np.zeros(n, bool) if boundary is None else boundary
    return DiscretizedSet(pts, np.ones(n), bd, pts.shape[1])


@pytest.fixture(scope="session")
def sphere_ctx():
    return assemble(NEWTON, build_set({"type": "sphere", "center": [0, 0, 0], "radius": 1.0}, 10))


@pytest.fixture(scope="session")
def ball_ctx():
    return assemble(NEWTON, build_set({"type": "ball", "center": [0, 0, 0], "radius": 1.0}, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
