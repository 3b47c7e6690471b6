import pytest

import _helpers as h


@pytest.fixture(scope="session")
def middle_thirds():
    return h.make_ifs(h.middle_thirds_config())


@pytest.fixture(scope="session")
def middle_thirds_osc():
    return h.make_ifs(h.middle_thirds_config(with_ball=True))


@pytest.fixture(scope="session")
def four_corner():
    return h.make_ifs(h.four_corner_config())


@pytest.fixture(scope="session")
def line_ifs():
    return h.make_ifs(h.line_config())


@pytest.fixture(scope="session")
def heis_cantor():
    return h.make_ifs(h.heis_config())
