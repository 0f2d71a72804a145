import numpy as np
import pytest
from hypothesis import settings

from fairbound import Alphabet, JointDistribution, use_base

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_joint(rng, shape=(2, 3, 3), names=("S", "X", "T"), zeros=0.0):
    p = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    if zeros:
        mask = rng.random(shape) < zeros
        mask.flat[rng.integers(p.size)] = False
        p = np.where(mask, 0.0, p)
        p /= p.sum()
    return JointDistribution([Alphabet.range(n, k) for n, k in zip(names, shape)], p)


def random_channel(rng, n_x, n_y, sparse=False):
    rows = rng.dirichlet(np.full(n_y, 0.7), size=n_x)
    if sparse:
        rows = np.where(rng.random(rows.shape) < 0.3, 0.0, rows)
        empty = rows.sum(axis=1) == 0
        rows[empty, rng.integers(n_y, size=empty.sum())] = 1.0
        rows /= rows.sum(axis=1, keepdims=True)
    return rows


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(autouse=True)
def _bits():
    with use_base("bits"):
        yield
