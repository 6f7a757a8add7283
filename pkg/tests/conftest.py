import pytest
from hypothesis import HealthCheck, settings

from cfsm.builtins import get
from cfsm.explore import build_lts

settings.register_profile("repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def example22():
    return get("example22").value


@pytest.fixture(scope="session")
def example33():
    return get("example33").value


@pytest.fixture(scope="session")
def lts22(example22):
    return {k: build_lts(example22, "p2p", k) for k in range(4)}


@pytest.fixture
def builtin():
    return lambda name: get(name).value
