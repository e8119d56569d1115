import warnings

import numpy as np
import pytest

from fogbandit import builtin_game1, load_dataset, select_subgame


@pytest.fixture(scope="session")
def game1():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return builtin_game1()


@pytest.fixture(scope="session")
def game2():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return select_subgame(load_dataset(), range(10), range(10))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
