import functools
import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from bezquadric import analyze, load_patch  # noqa: E402

PATCHES = pathlib.Path(__file__).resolve().parent.parent / "patches"

FIXTURES = {
    "ellipsoid": "ellipsoid.yaml",
    "two_sheeted": "two_sheeted_hyperboloid.yaml",
    "hyperbolic_paraboloid": "hyperbolic_paraboloid.yaml",
    "parabolic_cylinder": "parabolic_cylinder.yaml",
    "cone": "cone.yaml",
    "sphere": "sphere_tensor.yaml",
}
NON_DEGENERATE = ("ellipsoid", "two_sheeted", "hyperbolic_paraboloid", "sphere")


@functools.lru_cache(maxsize=None)
def fixture_patch(name):
    return load_patch(PATCHES / FIXTURES[name])


@functools.lru_cache(maxsize=None)
def fixture_analysis(name):
    return analyze(fixture_patch(name))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def normalized(v):
    """Scale by the largest magnitude, first significant entry positive."""
    v = np.asarray(v, dtype=float)
    v = v / np.abs(v).max()
    first = np.flatnonzero(np.abs(v) > 1e-12)[0]
    return v * np.sign(v[first])


def proportional(a, b, rtol):
    return np.allclose(normalized(a), normalized(b), rtol=0, atol=rtol)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
