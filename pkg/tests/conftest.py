import numpy as np
import pytest

from qmet import groups
from qmet.quantum_group import build_function_algebra, build_group_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cz2():
    return build_function_algebra(groups.cyclic(2))


@pytest.fixture
def cz3():
    return build_function_algebra(groups.cyclic(3))


@pytest.fixture
def gz2():
    return build_group_algebra(groups.cyclic(2))
