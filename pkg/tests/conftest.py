import functools

import pytest
from hypothesis import HealthCheck, settings

from isoforge import lattices

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def bundle(kind: str, window: int = 4, **params):
    if kind == "affine_honeycomb":
        return lattices.honeycomb(window, ((1.0, 0.4), (0.0, 1.3)))
    return lattices.generate(kind, window, **params)


@pytest.fixture(scope="session")
def honeycomb():
    return bundle("honeycomb", 4)


@pytest.fixture(scope="session")
def triangular():
    return bundle("triangular", 4)


@pytest.fixture(scope="session")
def grid():
    return bundle("product_grid", 4)


@pytest.fixture(scope="session")
def bcc():
    return bundle("bcc", 3)
