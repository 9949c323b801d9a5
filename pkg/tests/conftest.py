import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ringcert", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("ringcert")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
