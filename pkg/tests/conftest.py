import pytest

from services.precision import make_context


@pytest.fixture(scope="session")
def ctx():
    return make_context(50)


@pytest.fixture(scope="session")
def strict():
    return make_context(80, max_terms=800)


@pytest.fixture(scope="session")
def mp(ctx):
    return ctx.mp
