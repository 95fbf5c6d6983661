import pytest

from sumsetlab.groups import backend_from_spec

BACKEND_SPECS = ("zd:1", "zd:2", "free:2", "klein", "heis")


@pytest.fixture(params=BACKEND_SPECS)
def any_backend(request):
    return backend_from_spec(request.param)


@pytest.fixture
def z1():
    return backend_from_spec("zd:1")


@pytest.fixture
def z2():
    return backend_from_spec("zd:2")


@pytest.fixture
def free2():
    return backend_from_spec("free:2")


@pytest.fixture
def klein():
    return backend_from_spec("klein")


@pytest.fixture
def heis():
    return backend_from_spec("heis")
