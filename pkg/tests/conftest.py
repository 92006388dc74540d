import warnings

import numpy as np
import pytest

from bjapprox.linalg import DependentBasisWarning


@pytest.fixture(autouse=True)
def _quiet_dependent_basis():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DependentBasisWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
