import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixtree.mode_tree import (ModeTree, TreeNode, bit_order_of, build_baseline_tree,
                               build_bit_split_tree, build_even_odd_swap_tree,
                               build_k_group_swap_tree, build_random_bit_split_tree,
                               closed_form_dilations, complement, reduce_index_set,
                               sibling_pairs_count, theorem1_bounds, tiling, tree_from_children)


@st.composite
def tree_and_index_set(draw, proper=True):
    n = draw(st.sampled_from([4, 8, 16]))
    tree = build_random_bit_split_tree(n, draw(st.integers(0, 2**32 - 1)))
    hi = n - 1 if proper else n
    items = draw(st.sets(st.integers(1, n), min_size=1, max_size=hi))
    return tree, tuple(sorted(items))


def test_baseline_blocks():
    tree = build_baseline_tree(8)
    assert tree.root_label == tuple(range(1, 9))
    assert tree.children(tree.root_label) == ((1, 2, 3, 4), (5, 6, 7, 8))
    assert tree.nodes_at_depth(2) == ((1, 2), (3, 4), (5, 6), (7, 8))
    assert tree.depth == 3
    assert len(tree.interior) == 7
    assert tree.leaves == tuple((j,) for j in range(1, 9))


def test_even_odd_swap_levels(even_odd16):
    assert set(even_odd16.nodes_at_depth(1)) == {(1, 2, 3, 4, 9, 10, 11, 12),
                                                  (5, 6, 7, 8, 13, 14, 15, 16)}
    assert set(even_odd16.nodes_at_depth(2)) == {(1, 2, 3, 4), (5, 6, 7, 8),
                                                  (9, 10, 11, 12), (13, 14, 15, 16)}
    assert even_odd16.children((1, 2, 3, 4)) == ((1, 3), (2, 4))


@pytest.mark.parametrize('n', [4, 16, 64])
def test_two_group_swap_is_even_odd_swap(n):
    assert build_k_group_swap_tree(n, 2) == build_even_odd_swap_tree(n)


def test_constructor_preconditions():
    with pytest.raises(ValueError):
        build_baseline_tree(12)
    with pytest.raises(ValueError):
        build_even_odd_swap_tree(8)
    with pytest.raises(ValueError):
        build_k_group_swap_tree(16, 3)
    with pytest.raises(ValueError):
        build_bit_split_tree(8, (0, 0, 1))


def test_validate_rejects_overlapping_children():
    nodes = [TreeNode((1, 2, 3), (1, 2)), TreeNode((1, 2), None), TreeNode((2, 3), None)]
    with pytest.raises(ValueError):
        ModeTree(3, nodes)


def test_tree_from_children_and_json(baseline8):
    kids = {lab: baseline8.children(lab) for lab in baseline8.interior}
    assert tree_from_children(8, kids) == baseline8
    assert ModeTree.from_json(baseline8.to_json()) == baseline8


def test_parent_and_sibling(baseline8):
    assert baseline8.parent((3, 4)) == (1, 2, 3, 4)
    assert baseline8.sibling((3, 4)) == (1, 2)
    assert baseline8.parent(baseline8.root_label) is None
    assert baseline8.depth_of((5,)) == 3


@settings(max_examples=30)
@given(st.sampled_from([4, 8, 16, 32]), st.integers(0, 2**32 - 1))
def test_bit_order_round_trip(n, seed):
    tree = build_random_bit_split_tree(n, seed)
    assert build_bit_split_tree(n, bit_order_of(tree)) == tree


def test_closed_form_dilations():
    assert closed_form_dilations('baseline', 16) == (1, 2, 4, 8)
    assert closed_form_dilations('even-odd', 16) == (2, 1, 8, 4)
    assert closed_form_dilations('k-group', 16, 2) == (2, 1, 8, 4)
    assert closed_form_dilations('k-group', 16, 4) == (8, 4, 2, 1)
    with pytest.raises(KeyError):
        closed_form_dilations('spiral', 16)


def test_exemplar_tilings(baseline16, even_odd16, exemplar16):
    assert tiling(baseline16, exemplar16).nodes == ((1,), (3,), (5,), (7,), (9, 10), (13, 14))
    assert tiling(even_odd16, exemplar16).nodes == ((1, 3), (5, 7), (9,), (10,), (13,), (14,))
    for tree in (baseline16, even_odd16):
        report = theorem1_bounds(tree, exemplar16, 2)
        assert (report.lower, report.upper) == (64, 64)
        assert report.tiling_size == report.complement_tiling_size == 6


def test_root_is_maximal(baseline8):
    assert tiling(baseline8, range(1, 9)).nodes == (tuple(range(1, 9)),)


def test_small_lower_bound_exponent():
    tree = build_baseline_tree(4)
    assert sibling_pairs_count(tree, (1, 3)) == 2
    assert theorem1_bounds(tree, (1, 3), 2).lower == 4
    # the two root children are at depth one and never count
    assert sibling_pairs_count(tree, (1, 2)) == 0


def test_bounds_need_proper_subset(baseline8):
    with pytest.raises(ValueError):
        theorem1_bounds(baseline8, (), 2)
    with pytest.raises(ValueError):
        theorem1_bounds(baseline8, range(1, 9), 2)
    with pytest.raises(ValueError):
        theorem1_bounds(baseline8, (0, 1), 2)
    with pytest.raises(ValueError):
        theorem1_bounds(baseline8, (1,), 0)


def test_reduce_index_set():
    assert reduce_index_set((2, 5, 7), (1, 2, 5, 6)) == (2, 3)
    assert reduce_index_set((3,), (1, 2)) == ()


@settings(max_examples=60)
@given(tree_and_index_set(proper=False))
def test_tiling_is_the_maximal_partition(case):
    tree, items = case
    theta = tiling(tree, items)
    covered = [e for lab in theta for e in lab]
    assert sorted(covered) == list(items)
    for lab in theta:
        assert lab in tree
        parent = tree.parent(lab)
        assert parent is None or not set(parent) <= set(items)


@settings(max_examples=60)
@given(tree_and_index_set(), st.integers(1, 3))
def test_bounds_are_ordered(case, r):
    tree, items = case
    report = theorem1_bounds(tree, items, r)
    assert report.lower_exponent <= report.upper_exponent
    assert report.upper_exponent == min(len(tiling(tree, items)),
                                        len(tiling(tree, complement(items, tree.n))))


def _all_tilings(tree, items):
    """every collection of tree nodes that is a maximal partition of ``items``"""

    chosen = set(items)
    inside = [lab for lab in tree.interior + tree.leaves if set(lab) <= chosen]
    found = []
    for size in range(1, len(inside) + 1):
        for group in itertools.combinations(inside, size):
            covered = [e for lab in group for e in lab]
            if len(covered) != len(set(covered)) or set(covered) != chosen:
                continue
            parents = (tree.parent(lab) for lab in group)
            if all(p is None or not set(p) <= chosen for p in parents):
                found.append(tuple(sorted(group)))
    return found


@pytest.mark.parametrize('tree', [build_baseline_tree(4), build_bit_split_tree(4, (0, 1))])
def test_tiling_is_unique_on_four_modes(tree):
    for size in range(1, 5):
        for items in itertools.combinations(range(1, 5), size):
            assert _all_tilings(tree, items) == [tiling(tree, items).nodes], items


@pytest.mark.parametrize('seed', range(3))
def test_tiling_is_unique_on_small_index_sets(seed):
    tree = build_random_bit_split_tree(8, seed)
    for size in (1, 2, 3):
        for items in itertools.combinations(range(1, 9), size):
            assert _all_tilings(tree, items) == [tiling(tree, items).nodes], items


def test_baseline_tiling_example(baseline8):
    assert tiling(baseline8, (1, 2, 5)).nodes == ((1, 2), (5,))
    assert tiling(baseline8, range(1, 9)).nodes == (tuple(range(1, 9)),)
