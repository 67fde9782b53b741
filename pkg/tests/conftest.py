import pytest

from app.models.diffpoly import DiffPoly
from app.services.hierarchy import get_hierarchy
from app.services.lax import get_relation_table


@pytest.fixture(scope="session")
def table1():
    return get_relation_table(1)


@pytest.fixture(scope="session")
def table2():
    return get_relation_table(2)


@pytest.fixture(scope="session")
def hierarchy2():
    return get_hierarchy(2)


@pytest.fixture
def u():
    return DiffPoly.u()


@pytest.fixture
def v0():
    return DiffPoly.v(0)


@pytest.fixture
def w0():
    return DiffPoly.w(0)
