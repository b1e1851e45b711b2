import pytest

from opshift.ensembles import random_hermitian, random_pair, rng_stream


@pytest.fixture
def rng():
    return rng_stream(2024, 0)


def make_rng(seed, stream=0):
    return rng_stream(seed, stream)


def hermitian(seed, dim, norm=1.0, stream=0):
    return random_hermitian(rng_stream(seed, stream), dim, norm)


def pair(seed, dim, h_norm=1.0, v_norm=0.5):
    return random_pair(rng_stream(seed, 0), dim, h_norm, v_norm)
