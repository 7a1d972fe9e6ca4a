import pytest
from hypothesis import HealthCheck, settings

from semimod import semiring as sr
from semimod.module import free_module, span

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def sub(F, *gens):
    """Span of the given entry lists inside F."""
    return span([F.vector(g) for g in gens], F)


@pytest.fixture
def B():
    return sr.boolean()


@pytest.fixture
def B2():
    return free_module(sr.boolean(), 2)


@pytest.fixture
def B3():
    return free_module(sr.boolean(), 3)


@pytest.fixture
def Z2():
    return sr.zmod(2)


@pytest.fixture
def BxB():
    b = sr.boolean()
    return sr.product(b, b)
