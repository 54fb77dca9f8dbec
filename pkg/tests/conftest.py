import functools

import pytest
from hypothesis import HealthCheck, settings

from hgsys.cache import Context
from hgsys.cartan import BUILTIN_DATA, heisenberg_datum, weyl_datum
from hgsys.constructions import build_kashiwara, build_Uhat, build_Uprime, build_Uq, kashiwara_bundle, sridharan_bundle

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# one completion context for the whole run; construction is the slow part
CTX = Context(degree_bound=8)


@functools.lru_cache(maxsize=None)
def kashiwara(name):
    return kashiwara_bundle(BUILTIN_DATA[name], CTX)


@functools.lru_cache(maxsize=None)
def sridharan(name):
    lie, c = {"weyl": weyl_datum, "heisenberg": heisenberg_datum}[name]()
    return sridharan_bundle(lie, c, CTX)


@functools.lru_cache(maxsize=None)
def hopf(kind, name):
    build = {"Uq": build_Uq, "Uhat": build_Uhat, "Uprime": build_Uprime}[kind]
    return build(BUILTIN_DATA[name], CTX)


@functools.lru_cache(maxsize=None)
def B(name):
    return build_kashiwara(BUILTIN_DATA[name], CTX)


@pytest.fixture(scope="session")
def ctx():
    return CTX


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"{status} criterion {n}: {title}")
