import numpy as np
import pytest

from vcgrp.groups import (
    CyclicProductGroup,
    cyclic,
    dihedral_group,
    symmetric_group,
    vector_space,
)


@pytest.fixture(scope="session")
def z12():
    return cyclic(12)


@pytest.fixture(scope="session")
def z401():
    return cyclic(401)


@pytest.fixture(scope="session")
def z2x4():
    return CyclicProductGroup([2, 4])


@pytest.fixture(scope="session")
def f2_6():
    return vector_space(2, 6)


@pytest.fixture(scope="session")
def s3():
    return symmetric_group(3)


@pytest.fixture(scope="session")
def d4():
    return dihedral_group(4)


@pytest.fixture(scope="session")
def small_groups(z12, z2x4, s3, d4):
    return [z12, z2x4, s3, d4]


def brute_vc_dimension(masks_over_ground, ground_size, cap=10):
    """Independent VC oracle: test every subset by direct trace counting."""
    import itertools

    best = 0
    for k in range(1, min(cap, ground_size) + 1):
        found = False
        for S in itertools.combinations(range(ground_size), k):
            traces = {tuple((m >> p) & 1 for p in S) for m in masks_over_ground}
            if len(traces) == 1 << k:
                found = True
                break
        if not found:
            return best
        best = k
    return best


def rng_for(*key):
    return np.random.default_rng(list(key))
