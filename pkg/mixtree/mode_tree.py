#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
mode_tree.py - binary mode trees and their tiling combinatorics

A mode tree over [N] is a full binary tree whose leaves are the singletons
{1}..{N}, whose root is [N], and whose interior labels are the disjoint union
of their two children. Trees built here are bit-split trees: each depth-d node
is split by one bit position of (element - 1). The baseline, even/odd swap and
k-group swap families are instances of that construction.

Licensed under the MIT License, see LICENSE file for details
"""

from dataclasses import dataclass

import numpy as np

from mixtree.utilities.logger import mtLogger as mylog
from mixtree.utilities.tools import PARA, label_key


def as_label(items):
    return tuple(sorted(int(i) for i in items))


def _log2_exact(n):
    n = int(n)
    if n < 1 or n & (n - 1):
        mylog.critical(f'n = {n} is not a power of two')
        raise ValueError(f'n ({n}) should be a positive power of two.')
    return n.bit_length() - 1


@dataclass(frozen=True)
class TreeNode:
    label: tuple
    children: tuple = None


class ModeTree(object):
    """Full binary tree over the modes [N].

    Nodes are stored in pre-order; ``children`` holds node ids (positions in
    ``nodes``). Every query takes and returns labels (sorted int tuples).

    Args:
        n (int): number of modes.
        nodes (list): TreeNode records.
        root (int): id of the root node.

    Attributes:
        n (int):
        nodes (tuple):
        root (int):
        root_label (tuple):
        interior (tuple): interior labels, children before parents.
        leaves (tuple):

    Example:
        >>> tree = build_baseline_tree(4)
        >>> tree.children((1, 2, 3, 4))
        ((1, 2), (3, 4))
    """

    __slots__ = ['n', 'nodes', 'root', '_ids', '_parent', '_depth', 'interior', 'leaves']

    def __init__(self, n, nodes, root=0, validate=True):
        self.n = int(n)
        self.nodes = tuple(TreeNode(as_label(node.label), None if node.children is None
                                    else tuple(int(c) for c in node.children)) for node in nodes)
        self.root = int(root)
        self._index()
        if validate:
            self.validate()

    def _index(self):
        self._ids = {}
        for i, node in enumerate(self.nodes):
            if node.label in self._ids:
                raise ValueError(f'Label {node.label} appears twice in the tree.')
            self._ids[node.label] = i
        self._parent, self._depth = {}, {}
        if not 0 <= self.root < len(self.nodes):
            raise ValueError(f'Root id {self.root} is out of range.')
        stack = [(self.root, None, 0)]
        seen = set()
        while stack:
            i, parent, depth = stack.pop()
            if i in seen:
                raise ValueError(f'Node id {i} is reachable twice.')
            seen.add(i)
            label = self.nodes[i].label
            self._parent[label] = parent
            self._depth[label] = depth
            for c in self.nodes[i].children or ():
                if not 0 <= c < len(self.nodes):
                    raise ValueError(f'Child id {c} of {label} is out of range.')
                stack.append((c, label, depth + 1))
        if len(seen) != len(self.nodes):
            raise ValueError('Some nodes are not reachable from the root.')
        by_size = sorted(self._parent, key=lambda lab: (len(lab), lab))
        self.interior = tuple(lab for lab in by_size if self.nodes[self._ids[lab]].children)
        self.leaves = tuple(lab for lab in by_size if not self.nodes[self._ids[lab]].children)

    def validate(self):
        """check the full-binary mode tree invariants, raise ValueError otherwise"""

        full = tuple(range(1, self.n + 1))
        if self.root_label != full:
            raise ValueError(f'Root label should be [1..{self.n}], got {self.root_label}.')
        for node in self.nodes:
            if node.children is None:
                if len(node.label) != 1:
                    raise ValueError(f'Leaf {node.label} is not a singleton.')
                continue
            if len(node.children) != 2:
                raise ValueError(f'Node {node.label} has {len(node.children)} children, expected 2.')
            left, right = (self.nodes[c].label for c in node.children)
            if set(left) & set(right):
                raise ValueError(f'Children {left} and {right} of {node.label} overlap.')
            if as_label(left + right) != node.label:
                raise ValueError(f'Children of {node.label} do not partition it.')
        if sorted(self.leaves) != [(j,) for j in full]:
            raise ValueError(f'Leaves should be the singletons of [1..{self.n}].')
        return True

    @property
    def root_label(self):
        return self.nodes[self.root].label

    @property
    def depth(self):
        return max(self._depth.values())

    def __contains__(self, label):
        return as_label(label) in self._ids

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, label):
        return self.nodes[self._ids[as_label(label)]]

    def is_interior(self, label):
        label = as_label(label)
        return label in self._ids and self.nodes[self._ids[label]].children is not None

    def children(self, label):
        """(C_I, C_II) labels, or None at a leaf"""

        node = self[label]
        if node.children is None:
            return None
        return tuple(self.nodes[c].label for c in node.children)

    def parent(self, label):
        return self._parent[as_label(label)]

    def depth_of(self, label):
        return self._depth[as_label(label)]

    def sibling(self, label):
        parent = self.parent(label)
        if parent is None:
            return None
        left, right = self.children(parent)
        return right if left == as_label(label) else left

    def nodes_at_depth(self, depth):
        return tuple(sorted(lab for lab, d in self._depth.items() if d == depth))

    def structure(self):
        """canonical form: interior label -> ordered child labels"""

        return tuple((lab, self.children(lab)) for lab in self.interior)

    def same_as(self, other):
        return self.n == other.n and self.structure() == other.structure()

    def __eq__(self, other):
        if not isinstance(other, ModeTree):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        return hash((self.n, self.structure()))

    def __repr__(self):
        return f'ModeTree(n={self.n}, depth={self.depth})'

    def info(self):
        mylog.info(PARA.format('n', self.n))
        mylog.info(PARA.format('depth', self.depth))
        for d in range(self.depth + 1):
            blocks = ' '.join('{' + label_key(lab) + '}' for lab in self.nodes_at_depth(d))
            print(f'depth {d}: {blocks}')

    def to_json(self):
        nodes = [{'label': list(node.label),
                  'children': None if node.children is None else list(node.children)}
                 for node in self.nodes]
        return {'n': self.n, 'nodes': nodes, 'root': self.root}

    @classmethod
    def from_json(cls, payload):
        nodes = [TreeNode(tuple(item['label']),
                          None if item.get('children') is None else tuple(item['children']))
                 for item in payload['nodes']]
        return cls(payload['n'], nodes, payload.get('root', 0))


def tree_from_children(n, children):
    """build a ModeTree from a map interior label -> (C_I, C_II)

    Nodes are laid out in pre-order from the root [n].
    """

    children = {as_label(k): (as_label(v[0]), as_label(v[1])) for k, v in children.items()}
    nodes = []

    def place(label):
        i = len(nodes)
        nodes.append(None)
        if label in children:
            kids = tuple(place(c) for c in children[label])
            nodes[i] = TreeNode(label, kids)
        else:
            nodes[i] = TreeNode(label, None)
        return i

    place(tuple(range(1, int(n) + 1)))
    return ModeTree(n, nodes, 0)


def build_bit_split_tree(n, bit_order):
    """perfect mode tree splitting depth-d nodes by bit ``bit_order[d]`` of (e-1)

    The child whose elements have that bit cleared comes first (C_I).
    """

    L = _log2_exact(n)
    bit_order = tuple(int(b) for b in bit_order)
    if sorted(bit_order) != list(range(L)):
        raise ValueError(f'bit_order {bit_order} is not a permutation of 0..{L - 1}.')

    nodes = []

    def place(label, depth):
        i = len(nodes)
        nodes.append(None)
        if depth == L:
            nodes[i] = TreeNode(label, None)
            return i
        bit = bit_order[depth]
        low = tuple(e for e in label if not (e - 1) >> bit & 1)
        high = tuple(e for e in label if (e - 1) >> bit & 1)
        kids = (place(low, depth + 1), place(high, depth + 1))
        nodes[i] = TreeNode(label, kids)
        return i

    place(tuple(range(1, n + 1)), 0)
    return ModeTree(n, nodes, 0)


def baseline_bit_order(n):
    L = _log2_exact(n)
    return tuple(L - 1 - d for d in range(L))


def build_baseline_tree(n):
    """depth-l nodes are the contiguous blocks (k-1)N/2^l + [N/2^l]"""

    return build_bit_split_tree(n, baseline_bit_order(n))


def build_even_odd_swap_tree(n):
    """baseline bit order with adjacent pairs swapped; needs log2(n) even"""

    L = _log2_exact(n)
    if L % 2:
        raise ValueError(f'Even/odd swap needs an even number of levels, log2({n}) = {L}.')
    base = baseline_bit_order(n)
    order = []
    for d in range(0, L, 2):
        order.extend((base[d + 1], base[d]))
    return build_bit_split_tree(n, order)


def k_group_bit_order(n, k):
    L = _log2_exact(n)
    k = int(k)
    if k < 1 or L % k:
        raise ValueError(f'k ({k}) should divide log2(n) = {L}.')
    base = baseline_bit_order(n)
    order = []
    for start in range(0, L, k):
        order.extend(reversed(base[start:start + k]))
    return tuple(order)


def build_k_group_swap_tree(n, k):
    """baseline bit order with each block of k consecutive entries reversed"""

    return build_bit_split_tree(n, k_group_bit_order(n, k))


def build_random_bit_split_tree(n, seed):
    L = _log2_exact(n)
    rng = np.random.default_rng(seed)
    return build_bit_split_tree(n, tuple(int(b) for b in rng.permutation(L)))


def bit_order_of(tree):
    """recover the bit order of a bit-split tree

    Either child order is accepted. Raises ValueError for trees that are not
    perfect or not split by one bit per depth.
    """

    L = _log2_exact(tree.n)
    order = []
    for d in range(L):
        bits = set()
        for label in tree.nodes_at_depth(d):
            kids = tree.children(label)
            if kids is None:
                raise ValueError(f'Tree is not perfect: {label} is a leaf at depth {d}.')
            found = None
            for bit in range(L):
                low = tuple(e for e in label if not (e - 1) >> bit & 1)
                high = tuple(e for e in label if (e - 1) >> bit & 1)
                if set(kids) == {low, high}:
                    found = bit
                    break
            if found is None:
                raise ValueError(f'Node {label} is not split by a single bit.')
            bits.add(found)
        if len(bits) != 1:
            raise ValueError(f'Depth-{d} nodes are split by different bits {sorted(bits)}.')
        order.append(bits.pop())
    if tree.nodes_at_depth(L + 1):
        raise ValueError('Tree is deeper than log2(n).')
    return tuple(order)


def closed_form_dilations(kind, n, k=2):
    """closed-form layer dilations of the tree families, layers 1..L"""

    L = _log2_exact(n)
    if kind == 'baseline':
        return tuple(2 ** (l - 1) for l in range(1, L + 1))
    if kind == 'even-odd':
        if L % 2:
            raise ValueError(f'Even/odd swap needs an even number of levels, got {L}.')
        return tuple(2 ** (l - 2) if l % 2 == 0 else 2 ** l for l in range(1, L + 1))
    if kind == 'k-group':
        if k < 1 or L % k:
            raise ValueError(f'k ({k}) should divide log2(n) = {L}.')
        return tuple(2 ** (-(-l // k) * k - 1 - (l - 1) % k) for l in range(1, L + 1))
    raise KeyError(f'Unknown tree kind {kind!r}.')


@dataclass(frozen=True)
class Tiling:
    """maximal tree nodes whose disjoint union is the queried index set"""

    nodes: tuple

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, label):
        return as_label(label) in self.nodes


def _check_subset(tree, index_set, proper=False):
    items = as_label(set(int(i) for i in index_set))
    if not items:
        raise ValueError('Index set should be non-empty.')
    if items[0] < 1 or items[-1] > tree.n:
        raise ValueError(f'Index set {items} is outside [1, {tree.n}].')
    if proper and len(items) == tree.n:
        raise ValueError(f'Index set should be a proper subset of [1, {tree.n}], got all of it.')
    return items


def complement(index_set, n):
    chosen = set(index_set)
    return tuple(i for i in range(1, n + 1) if i not in chosen)


def tiling(tree, index_set):
    """Θ(I;T), computed top-down: a node enters when it fits inside I and its parent does not"""

    chosen = set(_check_subset(tree, index_set))
    found = []
    stack = [tree.root_label]
    while stack:
        label = stack.pop()
        if set(label) <= chosen:
            found.append(label)
            continue
        kids = tree.children(label)
        if kids:
            stack.extend(kids)
    return Tiling(tuple(sorted(found)))


def reduce_index_set(index_set, node_label):
    """reduction of I onto ν: positions j with i_j ∈ I ∩ ν, i_1 < ... enumerating ν"""

    label = as_label(node_label)
    if not label:
        raise ValueError('Node label should be non-empty.')
    chosen = set(int(i) for i in index_set)
    return tuple(j + 1 for j, e in enumerate(label) if e in chosen)


def sibling_pairs_count(tree, index_set):
    """pairs (ν1, ν2) ∈ Θ(I)×Θ(I^c) that are siblings below depth one"""

    items = _check_subset(tree, index_set, proper=True)
    theta_i = tiling(tree, items)
    theta_c = set(tiling(tree, complement(items, tree.n)).nodes)
    count = 0
    for label in theta_i:
        if tree.depth_of(label) <= 1:
            continue
        if tree.sibling(label) in theta_c:
            count += 1
    return count


@dataclass(frozen=True)
class BoundsReport:
    """rank bounds on grid-tensor matricizations for product g"""

    r: int
    upper_exponent: int
    lower_exponent: int
    tiling_size: int
    complement_tiling_size: int

    @property
    def upper(self):
        return self.r ** self.upper_exponent

    @property
    def lower(self):
        return self.r ** self.lower_exponent

    def to_json(self):
        return {'r': self.r, 'upper_exponent': self.upper_exponent,
                'lower_exponent': self.lower_exponent, 'upper': self.upper, 'lower': self.lower,
                'tiling_size': self.tiling_size,
                'complement_tiling_size': self.complement_tiling_size}


def theorem1_bounds(tree, index_set, r):
    """upper r^min(|Θ(I)|,|Θ(I^c)|), lower r^(sibling pairs below depth one)"""

    r = int(r)
    if r < 1:
        raise ValueError(f'r ({r}) should be positive.')
    items = _check_subset(tree, index_set, proper=True)
    size_i = len(tiling(tree, items))
    size_c = len(tiling(tree, complement(items, tree.n)))
    report = BoundsReport(r=r, upper_exponent=min(size_i, size_c),
                          lower_exponent=sibling_pairs_count(tree, items),
                          tiling_size=size_i, complement_tiling_size=size_c)
    mylog.debug(f'bounds r={r} tilings {size_i}/{size_c} lower exp {report.lower_exponent}')
    return report
