import pytest

from mrw_fluct.catalog import (
    alternating_point,
    alternating_random,
    asymmetric_three_state,
    gaussian_two_state,
    single_fair_walk,
    symmetric_two_state,
)


@pytest.fixture
def fair_walk():
    return single_fair_walk()


@pytest.fixture
def two_state():
    return symmetric_two_state()


@pytest.fixture
def three_state():
    return asymmetric_three_state()


@pytest.fixture
def alternating():
    return alternating_point()


@pytest.fixture
def alternating_rand():
    return alternating_random()


@pytest.fixture
def gaussian():
    return gaussian_two_state()
