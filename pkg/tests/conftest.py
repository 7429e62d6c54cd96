import io

import numpy as np
import pytest

from lexalign.data import RotationFixture
from lexalign.embeddings import load_vec


@pytest.fixture
def cat_dog_vec():
    return "2 3\ncat 1 0 0\ndog 0 1 0\n"


@pytest.fixture
def cat_dog(cat_dog_vec):
    return load_vec(io.StringIO(cat_dog_vec))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="module")
def noiseless_fixture():
    return RotationFixture(n=1000, d=50, noise=0.0, seed=7)
