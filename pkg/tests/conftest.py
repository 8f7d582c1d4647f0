import pytest

from almostnef.configuration import enumerate_configs, from_names


def gen5():
    return from_names([["a"], ["b"], ["c"], ["d"], ["e"]])


def col3():
    return from_names([["a"], ["b"], ["c"], ["d"], ["e"]], [["a", "b", "c"]])


def ch3():
    return from_names([["a1", "a2", "a3"], ["d"], ["e"]], [["a1", "a2", "a3"], ["a1", "d", "e"]])


def single_chain():
    return from_names([["a1", "a2", "a3", "a4", "a5"]])


@pytest.fixture
def GEN5():
    return gen5()


@pytest.fixture
def COL3():
    return col3()


@pytest.fixture
def CH3():
    return ch3()


@pytest.fixture(scope="session")
def configs5():
    return enumerate_configs(5)


@pytest.fixture(scope="session")
def configs4():
    return enumerate_configs(4)
