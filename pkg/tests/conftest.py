import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


@pytest.fixture
def path5():
    from graphbisect.graph import build_graph

    return build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])


@pytest.fixture
def grid9():
    from graphbisect.graph import generate

    return generate("grid", 9, {"rows": 3, "cols": 3})
