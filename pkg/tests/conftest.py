"""Shared fixtures and deterministic random-data helpers."""

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
