#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
network_oracle.py - forward passes of tree and mixed networks, brute-force grids

The forward passes evaluate the networks on one input window. Filling a
grid point by point through them gives the exhaustive oracle the
decompositions are checked against.

Licensed under the MIT License, see LICENSE file for details
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from mixtree.decomposition import GridTensorBatch, _check_inputs
from mixtree.mode_tree import _log2_exact, bit_order_of
from mixtree.tensor_core import ScalarKindError, coerce_array, get_operator, scalar_kind
from mixtree.utilities.logger import mtLogger as mylog
from mixtree.utilities.tools import PARA


# largest M^N * r the brute-force grid will fill
GRID_ENTRY_BUDGET = 2**22

# f64 comparisons against the network; summation order differs between the two paths
F64_RTOL = 1e-9


class GridBudgetError(ValueError):
    """Raised when a brute-force grid would exceed GRID_ENTRY_BUDGET."""


class InputWindow(object):
    """Inputs x_1..x_N of one output time point, rows of an (N, r) array."""

    __slots__ = ['vectors', 'scalar']

    def __init__(self, vectors, scalar=None):
        vectors = coerce_array(vectors, scalar)
        if vectors.ndim != 2:
            raise ValueError(f'An input window needs shape (N, r), got {vectors.shape}.')
        vectors.flags.writeable = False
        self.vectors = vectors
        self.scalar = scalar_kind(vectors)

    @property
    def n(self):
        return int(self.vectors.shape[0])

    @property
    def r(self):
        return int(self.vectors.shape[1])

    def __getitem__(self, j):
        """x_j, 1-based"""
        return self.vectors[j - 1]


def discretizer_window(disc, multi_index):
    """window (v^(d_1), ..., v^(d_N)) for a 0-based multi-index"""

    return InputWindow(disc.vectors[list(multi_index)], disc.scalar)


def _check_window(weights, window, n):
    if window.scalar != weights.scalar:
        raise ScalarKindError(f'Window is {window.scalar} but weights are {weights.scalar}.')
    if window.n != n:
        raise ValueError(f'Window has {window.n} inputs, the tree covers {n} modes.')
    if window.r != weights.r:
        raise ValueError(f'Window inputs have dimension {window.r}, expected r = {weights.r}.')


def _evaluate(tree, labels, weights, values, op):
    for label in labels:
        left, right = tree.children(label)
        a_i, a_ii = weights[label]
        values[label] = np.asarray(op(a_i.dot(values[left]), a_ii.dot(values[right])))


def forward_tree_network(tree, weights, window, g='product'):
    """output vector of the tree network on one window"""

    op = get_operator(g)
    weights.check_tree(tree)
    _check_window(weights, window, tree.n)
    values = {(j,): window[j] for j in range(1, tree.n + 1)}
    _evaluate(tree, tree.interior, weights, values, op)
    return values[tree.root_label]


def forward_mixed_network(spec, weights_t, weights_tbar, window, g='product'):
    """output of the interconnected pair; first r/2 channels cross at mixture nodes"""

    op = get_operator(g)
    r = weights_t.r
    if r % 2 or weights_tbar.r != r:
        raise ValueError(f'Mixed networks need one even r, got {r} and {weights_tbar.r}.')
    weights_t.check_tree(spec.tree_t)
    weights_tbar.check_tree(spec.tree_tbar)
    _check_window(weights_t, window, spec.n)
    h = r // 2
    values = {(j,): window[j] for j in range(1, spec.n + 1)}
    values_bar = dict(values)
    for mu, seg_t, seg_tbar in spec.segment_plan():
        _evaluate(spec.tree_t, seg_t, weights_t, values, op)
        _evaluate(spec.tree_tbar, seg_tbar, weights_tbar, values_bar, op)
        a, b = values[mu], values_bar[mu]
        values[mu] = np.concatenate([b[:h], a[h:]])
        values_bar[mu] = np.concatenate([a[:h], b[h:]])
    root = spec.tree_t.root_label
    return values[root] + values_bar[root]


def forward_dilated_baseline(n, weights, window, g='product'):
    """baseline network evaluated layer by layer along the time axis

    h^(0)[t] = x_t. Layer l produces h^(l)[t] from h^(l-1)[t - 2^(l-1)] and
    h^(l-1)[t], with the filter of the block of 2^l steps ending at t. Only
    the time points that feed the final output are computed.
    """

    L = _log2_exact(n)
    op = get_operator(g)
    _check_window(weights, window, n)
    hidden = {t: window[t] for t in range(1, n + 1)}
    for l in range(1, L + 1):
        gap, span = 2 ** (l - 1), 2 ** l
        layer = {}
        for t in range(span, n + 1, span):
            a_i, a_ii = weights[tuple(range(t - span + 1, t + 1))]
            layer[t] = np.asarray(op(a_i.dot(hidden[t - gap]), a_ii.dot(hidden[t])))
        hidden = layer
    return hidden[n]


def _grid_fill(forward, disc, n, r, scalar, threads, budget):
    M = disc.M
    total = M ** n
    if total * r > budget:
        mylog.critical(f'grid of {total} points x {r} outputs exceeds the budget {budget}')
        raise GridBudgetError(f'Grid needs {total * r} entries, budget is {budget}.')
    threads = max(1, int(threads))
    bounds = [total * i // threads for i in range(threads + 1)]

    def chunk(i):
        points = itertools.islice(itertools.product(range(M), repeat=n), bounds[i], bounds[i + 1])
        return [forward(discretizer_window(disc, idx)) for idx in points]

    if threads == 1:
        parts = [chunk(0)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, range(threads)))
    rows = [row for part in parts for row in part]
    values = np.empty((total, r), dtype=object if scalar == 'rational' else np.float64)
    for i, row in enumerate(rows):
        values[i] = row
    stack = np.moveaxis(values.reshape((M,) * n + (r,)), -1, 0)
    return GridTensorBatch(stack, scalar)


def grid_tensor_bruteforce(tree, weights, disc, g='product', threads=1, budget=GRID_ENTRY_BUDGET):
    """A^y(d_1..d_N) = f_y(v^(d_1), ..., v^(d_N)), one forward pass per grid point"""

    op = get_operator(g)
    weights.check_tree(tree)
    _check_inputs(weights, disc)
    mylog.debug(PARA.format('grid points', disc.M ** tree.n))
    forward = lambda window: forward_tree_network(tree, weights, window, op)
    return _grid_fill(forward, disc, tree.n, weights.r, weights.scalar, threads, budget)


def grid_mixed_bruteforce(spec, weights_t, weights_tbar, disc, g='product', threads=1,
                          budget=GRID_ENTRY_BUDGET):
    """brute-force grid of the mixed network"""

    op = get_operator(g)
    _check_inputs(weights_t, disc)
    forward = lambda window: forward_mixed_network(spec, weights_t, weights_tbar, window, op)
    return _grid_fill(forward, disc, spec.n, weights_t.r, weights_t.scalar, threads, budget)


@dataclass(frozen=True)
class DilationProfile:
    """dilation of layers 1..L, layer 1 nearest the input"""

    dilations: tuple

    def __len__(self):
        return len(self.dilations)

    def __iter__(self):
        return iter(self.dilations)

    def __getitem__(self, l):
        """dilation of layer l, 1-based"""
        return self.dilations[l - 1]


def dilation_profile(tree):
    """layer l has dilation 2^(bit_order(L - l))"""

    order = bit_order_of(tree)
    L = len(order)
    return DilationProfile(tuple(2 ** order[L - l] for l in range(1, L + 1)))
