"""Shared fixtures: builtin kernels, seeded generators, sample points"""
import numpy as np
import pytest

from finch.metrics import builtin_metric
from finch.models import FiberPoint


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def euclidean2():
    return builtin_metric("euclidean", 2)


@pytest.fixture
def funk2():
    return builtin_metric("funk", 2)


@pytest.fixture
def funk3():
    return builtin_metric("funk", 3)


@pytest.fixture
def klein2():
    return builtin_metric("klein", 2)


@pytest.fixture
def randers2():
    return builtin_metric("randers", 2)


@pytest.fixture
def riemannian2():
    return builtin_metric("riemannian", 2)


@pytest.fixture
def point2():
    return FiberPoint([0.1, -0.2], [0.7, 0.4])


@pytest.fixture
def point3():
    return FiberPoint([0.2, 0.1, -0.15], [0.3, -0.5, 0.8])


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep a user's ~/.finch/config.json and FINCH_* variables out of the tests"""
    for name in ("FINCH_SEED", "FINCH_TOL", "FINCH_SAMPLES", "FINCH_TRAJECTORIES", "FINCH_T_END",
                 "FINCH_RTOL", "FINCH_ATOL", "FINCH_DEBUG"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("FINCH_CONFIG", str(tmp_path / "missing-config.json"))
