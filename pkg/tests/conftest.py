import pytest

import hybridom as h


@pytest.fixture(scope="session")
def fig2():
    return h.load_preset("fig2")


@pytest.fixture(scope="session")
def fig3a():
    return h.load_preset("fig3a")


@pytest.fixture(scope="session")
def fig5():
    return h.load_preset("fig5")


@pytest.fixture(scope="session")
def fig8():
    return h.load_preset("fig8")
