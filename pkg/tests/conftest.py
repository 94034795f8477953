import numpy as np
import pytest

from mixtree.analysis import exemplar_index_set
from mixtree.decomposition import MixSpec, random_weights
from mixtree.mode_tree import build_baseline_tree, build_bit_split_tree, build_even_odd_swap_tree


@pytest.fixture
def baseline8():
    return build_baseline_tree(8)


@pytest.fixture
def baseline16():
    return build_baseline_tree(16)


@pytest.fixture
def even_odd16():
    return build_even_odd_swap_tree(16)


@pytest.fixture
def exemplar16():
    return exemplar_index_set(16)


@pytest.fixture
def small_spec():
    """baseline(8) and a tree sharing its depth-1 halves, mixing at both halves"""

    t = build_baseline_tree(8)
    tbar = build_bit_split_tree(8, (2, 0, 1))
    return MixSpec(t, tbar, [(1, 2, 3, 4), (5, 6, 7, 8)])


@pytest.fixture
def make_weights():
    def factory(tree, r, seed, **kwargs):
        return random_weights(tree, r, seed, **kwargs)
    return factory


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
