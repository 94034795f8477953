#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
decomposition.py - tree and mixed hierarchical decompositions of grid tensors

The tree decomposition follows a mode tree bottom-up. A leaf {j} carries
the r vectors (v^(1)_γ, ..., v^(M)_γ). Each interior node carries r tensors,
each the generalized tensor product of two weighted sums over its children's
tensors, with modes re-sorted by label. The mixed decomposition runs two tree
decompositions in parallel, exchanges the first r/2 tensors at every mixture
node and sums the two root collections.

Also here: hybrid-tree enumeration, the weight transfer that makes a mixed
decomposition reproduce any of its hybrids, and the explicit weight setting
that attains the sibling-pair rank lower bound.

Licensed under the MIT License, see LICENSE file for details
"""

import itertools
import os

import numpy as np

from mixtree.mode_tree import (ModeTree, as_label, build_baseline_tree,
                               build_even_odd_swap_tree, build_k_group_swap_tree,
                               complement, tiling, tree_from_children, _check_subset,
                               _log2_exact)
from mixtree.tensor_core import (DenseTensor, ScalarKindError, as_scalar, coerce_array,
                                 get_operator, generalized_tensor_product, scalar_kind,
                                 sorting_axes)
from mixtree.utilities.logger import mtLogger as mylog
from mixtree.utilities.tools import (PARA, PROP, format_rational, label_key, parse_label_key,
                                     read_json)


T_TAG = 'T'
TBAR_TAG = 'Tbar'


def _zeros(shape, scalar):
    return np.zeros(shape, dtype=object if scalar == 'rational' else np.float64)


def _encode(array, scalar):
    if scalar == 'rational':
        return [[format_rational(v) for v in row] for row in array]
    return [[float(v) for v in row] for row in array]


def _decode(rows, scalar):
    return coerce_array(np.array([[as_scalar(v, scalar) for v in row] for row in rows],
                                 dtype=object), scalar)


class WeightSet(object):
    """Per-node weight vectors of a tree decomposition.

    ``nodes[label] = (aI, aII)`` with aI, aII arrays of shape (r, r); row γ is
    the vector a^(ν,γ,I) (resp. a^(ν,γ,II)).

    Args:
        r (int): size constant.
        nodes (dict): interior label -> (aI, aII).
        scalar (str): 'rational' or 'f64'.
    """

    __slots__ = ['r', 'nodes', 'scalar']

    def __init__(self, r, nodes, scalar='rational'):
        self.r = int(r)
        self.scalar = scalar
        self.nodes = {}
        for label, (a_i, a_ii) in nodes.items():
            pair = []
            for a in (a_i, a_ii):
                a = coerce_array(a, scalar)
                if a.shape != (self.r, self.r):
                    raise ValueError(f'Weights of {as_label(label)} have shape {a.shape}, '
                                     f'expected {(self.r, self.r)}.')
                a.flags.writeable = False
                pair.append(a)
            self.nodes[as_label(label)] = tuple(pair)

    @classmethod
    def zeros(cls, tree, r, scalar='rational'):
        return cls(r, {lab: (_zeros((r, r), scalar), _zeros((r, r), scalar))
                       for lab in tree.interior}, scalar)

    def __getitem__(self, label):
        return self.nodes[as_label(label)]

    def __contains__(self, label):
        return as_label(label) in self.nodes

    def check_tree(self, tree):
        """weights must be keyed by exactly the interior nodes of ``tree``"""

        if set(self.nodes) != set(tree.interior):
            missing = sorted(set(tree.interior) - set(self.nodes))
            extra = sorted(set(self.nodes) - set(tree.interior))
            mylog.critical(f'weight keys do not match the tree: missing {missing}, extra {extra}')
            raise KeyError(f'Weight keys do not match int(tree): missing {missing}, extra {extra}.')

    def __eq__(self, other):
        if not isinstance(other, WeightSet):
            return NotImplemented
        if self.r != other.r or self.scalar != other.scalar or set(self.nodes) != set(other.nodes):
            return False
        return all(np.array_equal(self.nodes[k][s], other.nodes[k][s])
                   for k in self.nodes for s in (0, 1))

    __hash__ = None

    def __repr__(self):
        return f'WeightSet(r={self.r}, nodes={len(self.nodes)}, scalar={self.scalar!r})'

    def to_json(self):
        return {'r': self.r, 'scalar': self.scalar,
                'nodes': {label_key(lab): {'aI': _encode(a_i, self.scalar),
                                           'aII': _encode(a_ii, self.scalar)}
                          for lab, (a_i, a_ii) in self.nodes.items()}}

    @classmethod
    def from_json(cls, payload):
        scalar = payload.get('scalar', 'rational')
        nodes = {parse_label_key(k): (_decode(v['aI'], scalar), _decode(v['aII'], scalar))
                 for k, v in payload['nodes'].items()}
        return cls(payload['r'], nodes, scalar)


class Discretizers(object):
    """The M discretizer vectors, stored as the rows of an (M, r) array."""

    __slots__ = ['vectors', 'scalar']

    def __init__(self, vectors, scalar=None):
        vectors = coerce_array(vectors, scalar)
        if vectors.ndim != 2 or vectors.shape[0] < 1:
            raise ValueError(f'Discretizers need shape (M, r) with M >= 1, got {vectors.shape}.')
        vectors.flags.writeable = False
        self.vectors = vectors
        self.scalar = scalar_kind(vectors)

    @property
    def M(self):
        return int(self.vectors.shape[0])

    @property
    def r(self):
        return int(self.vectors.shape[1])

    def padded(self, r_mix):
        """append zero coordinates up to dimension r_mix"""

        if r_mix < self.r:
            raise ValueError(f'Cannot pad {self.r}-dimensional discretizers down to {r_mix}.')
        out = _zeros((self.M, r_mix), self.scalar)
        out[:, :self.r] = self.vectors
        return Discretizers(out, self.scalar)

    def __eq__(self, other):
        if not isinstance(other, Discretizers):
            return NotImplemented
        return self.scalar == other.scalar and np.array_equal(self.vectors, other.vectors)

    __hash__ = None

    def to_json(self):
        return {'scalar': self.scalar, 'vectors': _encode(self.vectors, self.scalar)}

    @classmethod
    def from_json(cls, payload):
        scalar = payload.get('scalar', 'rational')
        return cls(_decode(payload['vectors'], scalar), scalar)


def identity_discretizers(r, scalar='rational'):
    """v^(i) = e^(i), M = r"""

    eye = np.eye(int(r), dtype=np.int64)
    return Discretizers(eye, scalar)


def random_discretizers(M, r, seed, bound=5, scalar='rational'):
    rng = np.random.default_rng(seed)
    return Discretizers(rng.integers(-bound, bound + 1, size=(int(M), int(r))), scalar)


class GridTensorBatch(object):
    """The r grid tensors A^1..A^r produced by one decomposition.

    Held as one stacked array of shape (r, M, ..., M); ``tensors`` exposes
    them as DenseTensor values.
    """

    __slots__ = ['stack', 'scalar']

    def __init__(self, stack, scalar):
        stack = np.array(stack, dtype=object if scalar == 'rational' else np.float64)
        stack.flags.writeable = False
        self.stack = stack
        self.scalar = scalar

    @classmethod
    def from_tensors(cls, tensors):
        tensors = list(tensors)
        if not tensors:
            raise ValueError('A batch needs at least one tensor.')
        dims = {t.dims for t in tensors}
        kinds = {t.scalar for t in tensors}
        if len(dims) != 1 or len(kinds) != 1:
            raise ValueError('Batch tensors must share dims and scalar kind.')
        return cls(np.stack([t.array for t in tensors]), kinds.pop())

    @property
    def r(self):
        return int(self.stack.shape[0])

    @property
    def dims(self):
        return tuple(self.stack.shape[1:])

    @property
    def tensors(self):
        return tuple(DenseTensor.wrap(self.stack[y], self.scalar) for y in range(self.r))

    def __len__(self):
        return self.r

    def __getitem__(self, y):
        return DenseTensor.wrap(self.stack[y], self.scalar)

    def first(self, count):
        return GridTensorBatch(self.stack[:count], self.scalar)

    def add(self, other):
        if self.scalar != other.scalar:
            raise ScalarKindError(f'Cannot add {self.scalar} and {other.scalar} batches.')
        if self.stack.shape != other.stack.shape:
            raise ValueError(f'Batch shapes differ: {self.stack.shape} vs {other.stack.shape}.')
        return GridTensorBatch(self.stack + other.stack, self.scalar)

    def first_difference(self, other, rtol=0.0):
        """None when equal, else (y, 1-based multi-index, mine, theirs) of the first mismatch

        With rtol > 0 (float batches only) entries count as equal within rtol
        of the largest magnitude in ``other``.
        """

        if self.stack.shape != other.stack.shape:
            return (None, None, self.stack.shape, other.stack.shape)
        if rtol and self.scalar == 'f64' and other.scalar == 'f64':
            scale = float(np.max(np.abs(other.stack))) if other.stack.size else 0.0
            differ = np.abs(self.stack - other.stack) > rtol * max(scale, 1.0)
        else:
            differ = self.stack != other.stack
        if not differ.any():
            return None
        pos = np.unravel_index(int(np.flatnonzero(differ.ravel())[0]), self.stack.shape)
        return (int(pos[0]), tuple(int(i) + 1 for i in pos[1:]),
                self.stack[pos], other.stack[pos])

    def __eq__(self, other):
        if not isinstance(other, GridTensorBatch):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self):
        return f'GridTensorBatch(r={self.r}, dims={self.dims}, scalar={self.scalar!r})'

    def to_json(self):
        return {'r': self.r, 'scalar': self.scalar,
                'tensors': [t.to_json() for t in self.tensors]}

    @classmethod
    def from_json(cls, payload):
        return cls.from_tensors(DenseTensor.from_json(t) for t in payload['tensors'])


def _weighted_sum(weights, stack):
    """row γ of the result is Σ_α weights[γ, α] · stack[α]"""

    return np.tensordot(weights, stack, axes=1)


def _node_stack(child_labels, a_i, a_ii, left, right, op):
    """r tensors of a node from its children's tensor stacks"""

    left = _weighted_sum(a_i, left)
    right = _weighted_sum(a_ii, right)
    r = left.shape[0]
    lhs = left.reshape(left.shape + (1,) * (right.ndim - 1))
    rhs = right.reshape((r,) + (1,) * (left.ndim - 1) + right.shape[1:])
    out = np.asarray(op(lhs, rhs))
    axes = (0,) + tuple(1 + a for a in sorting_axes(child_labels[0] + child_labels[1]))
    return np.ascontiguousarray(np.transpose(out, axes))


def _check_inputs(weights, disc):
    if weights.scalar != disc.scalar:
        raise ScalarKindError(f'Weights are {weights.scalar} but discretizers are {disc.scalar}.')
    if disc.r != weights.r:
        mylog.critical(f'discretizer dimension {disc.r} differs from r = {weights.r}')
        raise ValueError(f'Discretizer dimension ({disc.r}) should equal r ({weights.r}).')


def _leaf_stack(disc):
    return np.array(disc.vectors.T)


def _fill(tree, labels, weights, phi, op):
    for label in labels:
        kids = tree.children(label)
        a_i, a_ii = weights[label]
        phi[label] = _node_stack(kids, a_i, a_ii, phi[kids[0]], phi[kids[1]], op)


def tree_decompose(tree, weights, disc, g='product'):
    """run the tree decomposition and return {φ^([N],y)}_y

    Args:
        tree: ModeTree.
        weights: WeightSet keyed by int(tree).
        disc: Discretizers of dimension r.
        g: operator tag or BinaryOperator.
    """

    op = get_operator(g)
    weights.check_tree(tree)
    _check_inputs(weights, disc)
    leaf = _leaf_stack(disc)
    phi = {lab: leaf for lab in tree.leaves}
    _fill(tree, tree.interior, weights, phi, op)
    return GridTensorBatch(phi[tree.root_label], weights.scalar)


def baseline_decompose(n, weights, disc, g='product'):
    """baseline decomposition over contiguous blocks, one tensor at a time

    Layer l, position j covers modes (j-1)2^l+1 .. j·2^l. No tree object is
    consulted; children are the two half blocks and never need re-sorting.
    """

    L = _log2_exact(n)
    op = get_operator(g)
    _check_inputs(weights, disc)
    r = weights.r
    level = [[DenseTensor.wrap(disc.vectors[:, gamma], disc.scalar) for gamma in range(r)]
             for _ in range(n)]
    for l in range(1, L + 1):
        width = 2 ** l
        nxt = []
        for j in range(1, n // width + 1):
            block = tuple(range((j - 1) * width + 1, j * width + 1))
            a_i, a_ii = weights[block]
            left, right = level[2 * j - 2], level[2 * j - 1]
            tensors = []
            for gamma in range(r):
                lhs = sum((a_i[gamma, alpha] * left[alpha].array for alpha in range(r)),
                          _zeros(left[0].dims, weights.scalar))
                rhs = sum((a_ii[gamma, alpha] * right[alpha].array for alpha in range(r)),
                          _zeros(right[0].dims, weights.scalar))
                tensors.append(generalized_tensor_product(DenseTensor.wrap(lhs, weights.scalar),
                                                          DenseTensor.wrap(rhs, weights.scalar), op))
            nxt.append(tensors)
        level = nxt
    return GridTensorBatch.from_tensors(level[0])


class MixSpec(object):
    """Two mode trees over [N] and the mixture nodes where they exchange tensors.

    Attributes:
        tree_t (ModeTree):
        tree_tbar (ModeTree):
        mixture_nodes (tuple): sorted labels, root excluded.
    """

    __slots__ = ['tree_t', 'tree_tbar', 'mixture_nodes']

    def __init__(self, tree_t, tree_tbar, mixture_nodes=()):
        self.tree_t = tree_t
        self.tree_tbar = tree_tbar
        self.mixture_nodes = tuple(sorted({as_label(m) for m in mixture_nodes},
                                          key=lambda lab: (len(lab), lab)))
        self.validate()

    def validate(self):
        if self.tree_t.n != self.tree_tbar.n:
            raise ValueError(f'Trees cover different mode counts: {self.tree_t.n} vs {self.tree_tbar.n}.')
        root = self.tree_t.root_label
        for mu in self.mixture_nodes:
            if mu == root:
                raise ValueError('The root cannot be a mixture node.')
            if not (self.tree_t.is_interior(mu) and self.tree_tbar.is_interior(mu)):
                raise ValueError(f'Mixture node {mu} is not interior in both trees.')
        return True

    @property
    def n(self):
        return self.tree_t.n

    def tree(self, tag):
        if tag == T_TAG:
            return self.tree_t
        if tag == TBAR_TAG:
            return self.tree_tbar
        raise KeyError(f'Unknown tree tag {tag!r}.')

    def traversal(self, reverse_ties=False):
        """mixture nodes and the root in inclusion order

        Smaller labels come first; equal sizes are ordered lexicographically
        (or reverse-lexicographically when ``reverse_ties``).
        """

        stops = list(self.mixture_nodes) + [self.tree_t.root_label]
        stops.sort(key=lambda lab: lab, reverse=reverse_ties)
        stops.sort(key=len)
        return tuple(stops)

    def segment_plan(self, reverse_ties=False):
        """[(μ, segment of T, segment of T̄)] in traversal order

        A segment holds the interior nodes inside μ not claimed by an earlier
        stop, children before parents.
        """

        plan = []
        claimed = {T_TAG: set(), TBAR_TAG: set()}
        for mu in self.traversal(reverse_ties):
            inside = set(mu)
            segments = []
            for tag in (T_TAG, TBAR_TAG):
                seg = [lab for lab in self.tree(tag).interior
                       if lab not in claimed[tag] and set(lab) <= inside]
                claimed[tag].update(seg)
                segments.append(tuple(seg))
            plan.append((mu, segments[0], segments[1]))
        return plan

    def to_json(self, tree_t_ref=None, tree_tbar_ref=None):
        return {'tree_t': tree_t_ref or self.tree_t.to_json(),
                'tree_tbar': tree_tbar_ref or self.tree_tbar.to_json(),
                'mixture_nodes': [list(m) for m in self.mixture_nodes]}

    @classmethod
    def from_json(cls, payload, base_dir='.'):
        trees = []
        for key in ('tree_t', 'tree_tbar'):
            ref = payload[key]
            if isinstance(ref, str):
                ref = read_json(os.path.join(base_dir, ref))
            trees.append(ModeTree.from_json(ref))
        return cls(trees[0], trees[1], payload.get('mixture_nodes', ()))


def shared_nodes_at_depth(tree_t, tree_tbar, depth):
    root = tree_t.root_label
    return tuple(lab for lab in tree_t.nodes_at_depth(depth)
                 if lab != root and tree_t.is_interior(lab) and tree_tbar.is_interior(lab))


def even_odd_mix_spec(n=16):
    """baseline and even/odd swap trees, mixing at the depth-2 quarters"""

    t, tbar = build_baseline_tree(n), build_even_odd_swap_tree(n)
    return MixSpec(t, tbar, shared_nodes_at_depth(t, tbar, 2))


def separation_spec(n, k):
    """baseline and k-group swap trees, mixing at the shared depth-(L-k) nodes"""

    L = _log2_exact(n)
    t, tbar = build_baseline_tree(n), build_k_group_swap_tree(n, k)
    return MixSpec(t, tbar, shared_nodes_at_depth(t, tbar, L - int(k)))


def _swap_halves(a, b):
    h = a.shape[0] // 2
    return np.concatenate([b[:h], a[h:]]), np.concatenate([a[:h], b[h:]])


def mixed_decompose(spec, weights_t, weights_tbar, disc, g='product', reverse_ties=False):
    """run the mixed decomposition, A^y = φ^([N],y) + φ̄^([N],y)"""

    op = get_operator(g)
    r = weights_t.r
    if weights_tbar.r != r:
        raise ValueError(f'Weight sets disagree on r: {r} vs {weights_tbar.r}.')
    if r % 2:
        mylog.critical(f'mixed decomposition got odd r = {r}')
        raise ValueError(f'The mixed decomposition needs an even r, got {r}.')
    if weights_t.scalar != weights_tbar.scalar:
        raise ScalarKindError('Weight sets of the two trees use different scalar kinds.')
    spec.validate()
    weights_t.check_tree(spec.tree_t)
    weights_tbar.check_tree(spec.tree_tbar)
    _check_inputs(weights_t, disc)

    leaf = _leaf_stack(disc)
    phi = {(j,): leaf for j in range(1, spec.n + 1)}
    phibar = dict(phi)
    for mu, seg_t, seg_tbar in spec.segment_plan(reverse_ties):
        _fill(spec.tree_t, seg_t, weights_t, phi, op)
        _fill(spec.tree_tbar, seg_tbar, weights_tbar, phibar, op)
        phi[mu], phibar[mu] = _swap_halves(phi[mu], phibar[mu])
    root = spec.tree_t.root_label
    return GridTensorBatch(phi[root] + phibar[root], weights_t.scalar)


class HybridTree(object):
    """A mode tree stitched from segments of T and T̄, with per-node sources.

    Attributes:
        tree (ModeTree):
        source (dict): interior label -> 'T' or 'Tbar'.
        choices (tuple): tag chosen at each traversal stop.
    """

    __slots__ = ['tree', 'source', 'choices']

    def __init__(self, tree, source, choices=()):
        self.tree = tree
        self.source = {as_label(k): v for k, v in source.items()}
        self.choices = tuple(choices)
        if set(self.source) != set(tree.interior):
            raise ValueError('Hybrid sources must cover exactly the interior nodes.')
        if set(self.source.values()) - {T_TAG, TBAR_TAG}:
            raise ValueError(f'Unknown source tags {set(self.source.values())}.')

    def key(self):
        return (self.tree.structure(), tuple(sorted(self.source.items())))

    def __eq__(self, other):
        if not isinstance(other, HybridTree):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f'HybridTree(choices={"".join("T" if c == T_TAG else "B" for c in self.choices)})'

    def to_json(self):
        return {'tree': self.tree.to_json(), 'choices': list(self.choices),
                'source': {label_key(k): v for k, v in sorted(self.source.items())}}

    @classmethod
    def from_json(cls, payload):
        source = {parse_label_key(k): v for k, v in payload['source'].items()}
        return cls(ModeTree.from_json(payload['tree']), source, payload.get('choices', ()))


def hybrid_from_choices(spec, choices):
    """the hybrid taking, at each traversal stop, the segment of the chosen tree"""

    plan = spec.segment_plan()
    choices = tuple(choices)
    if len(choices) != len(plan):
        raise ValueError(f'{len(choices)} choices given for {len(plan)} traversal stops.')
    kids, source = {}, {}
    for (mu, seg_t, seg_tbar), tag in zip(plan, choices):
        tree = spec.tree(tag)
        for label in (seg_t if tag == T_TAG else seg_tbar):
            kids[label] = tree.children(label)
            source[label] = tag
    try:
        tree = tree_from_children(spec.n, kids)
    except (ValueError, RecursionError) as err:
        mylog.critical(f'choice sequence {choices} produced an invalid tree: {err}')
        raise RuntimeError(f'Hybrid for choices {choices} is not a valid mode tree: {err}')
    return HybridTree(tree, source, choices)


def enumerate_hybrids(spec):
    """every hybrid of ``spec``, one per choice sequence, duplicates removed"""

    stops = len(spec.segment_plan())
    found, seen = [], set()
    for choices in itertools.product((T_TAG, TBAR_TAG), repeat=stops):
        hybrid = hybrid_from_choices(spec, choices)
        key = hybrid.key()
        if key in seen:
            continue
        seen.add(key)
        found.append(hybrid)
    mylog.info(PARA.format('choice sequences', 2 ** stops))
    mylog.info(PROP.format('distinct hybrids', len(found)))
    return found


def hybrid_to_mixed_weights(spec, hybrid, hybrid_weights):
    """weights for T and T̄ (size 2·r_h) under which the mixed decomposition reproduces ``hybrid``

    Slot γ + r_h of t(ν) receives a^(H,ν,γ,·). The copy sits in the upper
    coordinates when the child comes from the same tree and in the lower ones
    otherwise (leaves included). The slot halves of ν are swapped when its
    parent comes from the other tree; the root is always swapped.
    """

    r_h = hybrid_weights.r
    r_mix = 2 * r_h
    scalar = hybrid_weights.scalar
    hybrid_weights.check_tree(hybrid.tree)
    out = {tag: {lab: [_zeros((r_mix, r_mix), scalar), _zeros((r_mix, r_mix), scalar)]
                 for lab in spec.tree(tag).interior}
           for tag in (T_TAG, TBAR_TAG)}

    for label in hybrid.tree.interior:
        tag = hybrid.source[label]
        kids = hybrid.tree.children(label)
        if not spec.tree(tag).is_interior(label) or spec.tree(tag).children(label) != kids:
            mylog.critical(f'hybrid node {label} does not match its source tree {tag}')
            raise ValueError(f'Hybrid node {label} is not a node of tree {tag} with the same children.')
        parent = hybrid.tree.parent(label)
        swap = parent is None or hybrid.source[parent] != tag
        for side, (child, a) in enumerate(zip(kids, hybrid_weights[label])):
            block = out[tag][label][side]
            if hybrid.source.get(child) == tag:
                block[r_h:, r_h:] = a
            else:
                block[r_h:, :r_h] = a
            if swap:
                out[tag][label][side] = np.concatenate([block[r_h:], block[:r_h]])

    return (WeightSet(r_mix, {k: tuple(v) for k, v in out[T_TAG].items()}, scalar),
            WeightSet(r_mix, {k: tuple(v) for k, v in out[TBAR_TAG].items()}, scalar))


def lower_bound_weights(tree, index_set, r):
    """explicit weights whose grid tensors reach rank r^(sibling pairs) w.r.t. I

    Meant for identity discretizers (M = r) and product g. Nodes inside I or
    inside I^c, and nodes whose children split between the two tilings,
    carry e^(γ) in slot γ. Every other node uses slot 1 only: the all-ones
    vector towards a child that splits between the tilings, e^(1) towards any
    other child. At the root every slot repeats that slot-1 pattern.
    """

    r = int(r)
    if r < 1:
        raise ValueError(f'r ({r}) should be positive.')
    items = _check_subset(tree, index_set, proper=True)
    chosen = set(items)
    rest = set(complement(items, tree.n))
    theta_i = set(tiling(tree, items).nodes)
    theta_c = set(tiling(tree, tuple(sorted(rest))).nodes)

    def splits(label):
        kids = tree.children(label)
        return kids is not None and (
            (kids[0] in theta_i and kids[1] in theta_c) or (kids[0] in theta_c and kids[1] in theta_i))

    eye = np.eye(r, dtype=np.int64).astype(object)
    ones = np.ones(r, dtype=np.int64).astype(object)
    e1 = np.zeros(r, dtype=np.int64).astype(object)
    e1[0] = 1
    root = tree.root_label
    if splits(root):
        mylog.warning('I and its complement are the two children of the root; '
                      'the attainable rank is 1')

    nodes = {}
    for label in tree.interior:
        kids = tree.children(label)
        if set(label) <= chosen or set(label) <= rest:
            nodes[label] = (eye, eye)
        elif label == root:
            nodes[label] = tuple(np.tile(ones if splits(c) else e1, (r, 1)) for c in kids)
        elif splits(label):
            nodes[label] = (eye, eye)
        else:
            pair = []
            for c in kids:
                a = _zeros((r, r), 'rational')
                a[0] = ones if splits(c) else e1
                pair.append(a)
            nodes[label] = tuple(pair)
    return WeightSet(r, nodes, 'rational')


def random_weights(tree, r, seed, distribution='integer', bound=5, scalar=None):
    """seeded random weights for every interior node of ``tree``

    Args:
        distribution: 'integer' draws uniformly from [-bound, bound]; 'unit-float'
            draws uniformly from [-1, 1) and needs the f64 scalar kind.
        scalar: defaults to 'rational' for integer draws, 'f64' otherwise.
    """

    rng = np.random.default_rng(seed)
    r = int(r)
    if distribution in ('integer', 'integer-uniform'):
        if bound < 1:
            raise ValueError(f'Integer weights need bound >= 1, got {bound}.')
        scalar = scalar or 'rational'
        draw = lambda: rng.integers(-bound, bound + 1, size=(r, r))
    elif distribution in ('unit-float', 'float'):
        scalar = scalar or 'f64'
        if scalar != 'f64':
            raise ScalarKindError('Float weights need the f64 scalar kind.')
        draw = lambda: rng.uniform(-1.0, 1.0, size=(r, r))
    else:
        raise KeyError(f'Unknown weight distribution {distribution!r}.')
    nodes = {}
    for label in tree.interior:
        a_i = draw()
        a_ii = draw()
        nodes[label] = (a_i, a_ii)
    return WeightSet(r, nodes, scalar)
