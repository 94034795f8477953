#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
tensor_core.py - dense tensors and the algebra used by the decompositions

Dense tensors of exact rationals or float64, the (generalized) tensor
product, mode permutation, matricization, Kronecker products and
matrix rank.

Exact rationals live in numpy object arrays whose entries are Python ``int``
or ``fractions.Fraction``. Both are reduced rationals, and integer-valued data
stays in plain ints, which keeps the exact path fast.

Licensed under the MIT License, see LICENSE file for details
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from mixtree.utilities.logger import mtLogger as mylog
from mixtree.utilities.tools import format_rational, parse_rational


SCALAR_KINDS = ('rational', 'f64')

# relative singular value cut for numeric rank
NUMERIC_RANK_TOL = 1e-10

# exact rank switches from Bareiss to multi-modular elimination above this size
BAREISS_MAX_DIM = 40


class ScalarKindError(TypeError):
    """Raised when rational and float64 data meet in one operation."""


def as_scalar(value, kind='rational'):
    """convert one value to the scalar kind

    Floats are refused for the rational kind; use Fraction(x) explicitly if an
    exact binary expansion is wanted.
    """

    if kind == 'rational':
        if isinstance(value, (float, np.floating)):
            raise ScalarKindError(f'Float {value!r} given where an exact rational is required.')
        if isinstance(value, str):
            return parse_rational(value)
        q = Fraction(value)
        return q.numerator if q.denominator == 1 else q
    if kind == 'f64':
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)
    raise ValueError(f'Unknown scalar kind {kind!r}, expected one of {SCALAR_KINDS}.')


def scalar_kind(array):
    """scalar kind of a numpy array: object -> rational, float -> f64"""

    array = np.asarray(array)
    if array.dtype == object:
        return 'rational'
    if np.issubdtype(array.dtype, np.floating):
        return 'f64'
    if np.issubdtype(array.dtype, np.integer):
        return 'rational'
    raise ScalarKindError(f'Unsupported dtype {array.dtype}.')


def coerce_array(data, kind=None):
    """numpy array of the requested scalar kind

    Integer inputs become Python ints inside an object array so that exact
    arithmetic never overflows.
    """

    array = np.asarray(data)
    if kind is None:
        kind = scalar_kind(array) if array.size else 'rational'
    if kind == 'f64':
        if array.dtype == object:
            return np.vectorize(lambda v: as_scalar(v, 'f64'), otypes=[np.float64])(array) \
                if array.size else array.astype(np.float64)
        return array.astype(np.float64)
    if kind == 'rational':
        if np.issubdtype(array.dtype, np.floating):
            raise ScalarKindError('Float data given where exact rationals are required.')
        if np.issubdtype(array.dtype, np.integer):
            return array.astype(object)
        out = np.empty(array.shape, dtype=object)
        for idx, v in np.ndenumerate(array):
            out[idx] = as_scalar(v, 'rational')
        return out
    raise ValueError(f'Unknown scalar kind {kind!r}, expected one of {SCALAR_KINDS}.')


def _frozen(array):
    array.flags.writeable = False
    return array


def _check_same_kind(a, b):
    if a.scalar != b.scalar:
        mylog.critical(f'scalar kinds differ: {a.scalar} vs {b.scalar}')
        raise ScalarKindError(f'Cannot combine {a.scalar} with {b.scalar} data.')


class BinaryOperator(object):
    """Commutative elementwise operator g used by the generalized tensor product.

    Args:
        name (str): tag used in reports and on the command line.
        fn (callable): elementwise function on numpy arrays (broadcasting).
        zero_preserving (bool): whether g(0, 0) = 0 is known to hold.
    """

    __slots__ = ['name', 'fn', 'zero_preserving']

    def __init__(self, name, fn, zero_preserving=False):
        self.name = name
        self.fn = fn
        self.zero_preserving = zero_preserving

    def __call__(self, x, y):
        return self.fn(x, y)

    def __repr__(self):
        return f'BinaryOperator({self.name!r})'


PRODUCT = BinaryOperator('product', np.multiply, zero_preserving=True)
RELU_SUM = BinaryOperator('relu-sum', lambda x, y: np.maximum(x + y, 0), zero_preserving=True)

OPERATORS = {
    'product': PRODUCT,
    'relu-sum': RELU_SUM,
}


def get_operator(g):
    """resolve an operator tag, a BinaryOperator, or a plain two-argument callable"""

    if isinstance(g, BinaryOperator):
        return g
    if isinstance(g, str):
        key = g.strip().lower().replace('_', '-')
        if key == 'relusum':
            key = 'relu-sum'
        if key not in OPERATORS:
            raise KeyError(f'Unknown operator {g!r}, known: {sorted(OPERATORS)}.')
        return OPERATORS[key]
    if callable(g):
        return BinaryOperator(getattr(g, '__name__', 'custom'), np.frompyfunc(g, 2, 1))
    raise TypeError(f'Operator should be a name or a callable, now it is {type(g)}.')


def sorting_axes(labels):
    """axes that bring modes tagged by ``labels`` into ascending label order"""

    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise ValueError(f'Mode labels {labels} contain duplicates.')
    return tuple(int(i) for i in np.argsort(labels, kind='stable'))


class DenseTensor(object):
    """Order-N array of exact rationals or float64 values.

    Values are immutable; every operation returns a new tensor. Entries are
    addressed with 0-based numpy indices, data is row-major (last index
    fastest).

    Args:
        data: nested list or numpy array.
        scalar (str): 'rational' or 'f64'; inferred from the dtype when None.

    Attributes:
        dims (tuple): size of each mode.
        scalar (str): scalar kind shared by all entries.
        array (ndarray): read-only numpy view of the entries.

    Example:
        >>> t = DenseTensor([[1, 2], [3, 4]])
        >>> t.dims
        (2, 2)
    """

    __slots__ = ['dims', 'scalar', 'array']

    def __init__(self, data, scalar=None):
        array = coerce_array(data, scalar)
        self.scalar = scalar_kind(array)
        self.array = _frozen(array)
        self.dims = tuple(array.shape)

    @classmethod
    def wrap(cls, array, scalar):
        """adopt an array of the right dtype, skipping per-entry conversion"""

        obj = cls.__new__(cls)
        obj.scalar = scalar
        obj.array = _frozen(np.array(array, dtype=object if scalar == 'rational' else np.float64))
        obj.dims = tuple(obj.array.shape)
        return obj

    @property
    def order(self):
        return len(self.dims)

    @property
    def size(self):
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    @property
    def data(self):
        """flat row-major entry list"""
        return list(self.array.ravel())

    def entry(self, index):
        return self.array[tuple(index)]

    def to_array(self):
        return np.array(self.array)

    def __eq__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return (self.dims == other.dims and self.scalar == other.scalar
                and bool(np.array_equal(self.array, other.array)))

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        return f'DenseTensor(dims={self.dims}, scalar={self.scalar!r})'

    def info(self):
        for attr in self.__slots__:
            if attr != 'array':
                print(f'{attr:10s} : {getattr(self, attr)}')

    def to_json(self):
        flat = self.array.ravel()
        if self.scalar == 'rational':
            data = [format_rational(v) for v in flat]
        else:
            data = [float(v) for v in flat]
        return {'dims': list(self.dims), 'scalar': self.scalar, 'data': data}

    @classmethod
    def from_json(cls, payload):
        dims = tuple(int(d) for d in payload['dims'])
        scalar = payload.get('scalar', 'rational')
        data = [as_scalar(v, scalar) for v in payload['data']]
        expected = int(np.prod(dims, dtype=np.int64)) if dims else 1
        if len(data) != expected:
            raise ValueError(f'Tensor data has {len(data)} entries, dims {dims} need {expected}.')
        array = np.empty(len(data), dtype=object if scalar == 'rational' else np.float64)
        array[:] = data
        return cls.wrap(array.reshape(dims), scalar)


class MatrixView(object):
    """Two-dimensional companion of DenseTensor holding matricizations.

    Attributes:
        rows (int):
        cols (int):
        scalar (str):
        array (ndarray): read-only rows x cols array.
    """

    __slots__ = ['rows', 'cols', 'scalar', 'array']

    def __init__(self, data, scalar=None):
        array = coerce_array(data, scalar)
        if array.ndim != 2:
            raise ValueError(f'A matrix needs two dimensions, got shape {array.shape}.')
        self.scalar = scalar_kind(array)
        self.array = _frozen(array)
        self.rows, self.cols = (int(s) for s in array.shape)

    @classmethod
    def wrap(cls, array, scalar):
        obj = cls.__new__(cls)
        obj.scalar = scalar
        obj.array = _frozen(np.array(array, dtype=object if scalar == 'rational' else np.float64))
        obj.rows, obj.cols = (int(s) for s in obj.array.shape)
        return obj

    @property
    def data(self):
        return list(self.array.ravel())

    def to_array(self):
        return np.array(self.array)

    def matmul(self, other):
        _check_same_kind(self, other)
        if self.cols != other.rows:
            raise ValueError(f'Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}.')
        return MatrixView.wrap(self.array.dot(other.array), self.scalar)

    def __eq__(self, other):
        if not isinstance(other, MatrixView):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols and self.scalar == other.scalar
                and bool(np.array_equal(self.array, other.array)))

    __hash__ = None

    def __repr__(self):
        return f'MatrixView({self.rows}x{self.cols}, scalar={self.scalar!r})'

    def to_json(self):
        payload = DenseTensor.wrap(self.array, self.scalar).to_json()
        payload['rows'], payload['cols'] = self.rows, self.cols
        return payload


def tensor_product(a, b):
    """outer product a ⊗ b, dims(a) ++ dims(b)"""

    return generalized_tensor_product(a, b, PRODUCT)


def generalized_tensor_product(a, b, g):
    """entry(d_1..d_{P+Q}) = g(a(d_1..d_P), b(d_{P+1}..d_{P+Q}))"""

    _check_same_kind(a, b)
    op = get_operator(g)
    left = a.array.reshape(a.dims + (1,) * b.order)
    out = op(left, b.array)
    return DenseTensor.wrap(np.asarray(out).reshape(a.dims + b.dims), a.scalar)


def _check_permutation(sigma, order):
    sigma = [int(s) for s in sigma]
    if len(sigma) != order:
        raise ValueError(f'Permutation of length {len(sigma)} given for an order-{order} tensor.')
    if sorted(sigma) != list(range(1, order + 1)):
        raise ValueError(f'{tuple(sigma)} is not a permutation of [1..{order}].')
    return sigma


def mode_permute(a, sigma):
    """result(d_1..d_N) = a(d_σ(1)..d_σ(N)), sigma given 1-based"""

    sigma = _check_permutation(sigma, a.order)
    # mode i of a lands on result mode sigma(i), so the result's axes read sigma^-1
    axes = [0] * a.order
    for i, s in enumerate(sigma):
        axes[s - 1] = i
    return DenseTensor.wrap(np.transpose(a.array, axes), a.scalar)


def inverse_permutation(sigma):
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[int(s) - 1] = i + 1
    return tuple(inv)


def align_to_sorted_modes(a, mode_labels):
    """reorder modes so that their labels ascend"""

    if len(mode_labels) != a.order:
        raise ValueError(f'{len(mode_labels)} labels given for an order-{a.order} tensor.')
    axes = sorting_axes(mode_labels)
    return DenseTensor.wrap(np.transpose(a.array, axes), a.scalar)


def _check_index_set(index_set, order):
    items = [int(i) for i in index_set]
    if any(i < 1 or i > order for i in items):
        raise ValueError(f'Index set {tuple(items)} is out of range for order {order}.')
    if any(items[t] >= items[t + 1] for t in range(len(items) - 1)):
        raise ValueError(f'Index set {tuple(items)} must be strictly increasing.')
    return items


def matricize(a, index_set):
    """[A]_I: rows run over the modes in I, columns over the rest, last index fastest"""

    if a.order < 1:
        raise ValueError('Matricization needs a tensor of order at least one.')
    rows_modes = [i - 1 for i in _check_index_set(index_set, a.order)]
    col_modes = [i for i in range(a.order) if i not in rows_modes]
    rows = int(np.prod([a.dims[i] for i in rows_modes], dtype=np.int64)) if rows_modes else 1
    cols = int(np.prod([a.dims[i] for i in col_modes], dtype=np.int64)) if col_modes else 1
    array = np.transpose(a.array, rows_modes + col_modes).reshape(rows, cols)
    return MatrixView.wrap(array, a.scalar)


def kronecker(a, b):
    """A ⊙ B with A_ij B_kl at row i·rows(B)+k, column j·cols(B)+l (0-based)"""

    _check_same_kind(a, b)
    out = a.array[:, None, :, None] * b.array[None, :, None, :]
    return MatrixView.wrap(out.reshape(a.rows * b.rows, a.cols * b.cols), a.scalar)


def matrix_rank(m, mode='exact', tol=NUMERIC_RANK_TOL, method='auto'):
    """rank of a MatrixView

    Args:
        m: MatrixView (or anything MatrixView accepts).
        mode: 'exact' for rational data, 'numeric' for float64 data.
        tol: relative singular value threshold of the numeric mode.
        method: exact-mode backend, 'auto', 'bareiss' or 'modular'.
    """

    if not isinstance(m, MatrixView):
        m = MatrixView(m)
    if mode == 'exact':
        if m.scalar != 'rational':
            raise ScalarKindError('Exact rank requires rational entries.')
        return exact_rank(m.array, method=method)
    if mode == 'numeric':
        if m.scalar != 'f64':
            raise ScalarKindError('Numeric rank requires float64 entries.')
        return numeric_rank(m.array, tol)
    raise ValueError(f'Unknown rank mode {mode!r}, expected exact or numeric.')


def numeric_rank(array, tol=NUMERIC_RANK_TOL):
    array = np.asarray(array, dtype=np.float64)
    if array.size == 0:
        return 0
    sv = np.linalg.svd(array, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def _integer_rows(array):
    """clear denominators row by row and drop zero rows and columns"""

    rows = []
    for row in np.asarray(array, dtype=object):
        den = 1
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
        ints = [int(v * den) for v in row]
        if any(ints):
            g = math.gcd(*ints)
            rows.append([x // g for x in ints])
    if not rows:
        return np.zeros((0, 0), dtype=object)
    mat = np.array(rows, dtype=object)
    keep = [j for j in range(mat.shape[1]) if any(mat[:, j])]
    return mat[:, keep]


def exact_rank(array, method='auto'):
    """exact rank of a 2-D array of ints / Fractions"""

    mat = _integer_rows(array)
    if mat.size == 0:
        return 0
    if method == 'auto':
        method = 'bareiss' if min(mat.shape) <= BAREISS_MAX_DIM else 'modular'
    if method == 'bareiss':
        return bareiss_rank(mat)
    if method == 'modular':
        return modular_rank(mat)
    raise ValueError(f'Unknown exact rank method {method!r}.')


def bareiss_rank(mat):
    """fraction-free Gaussian elimination; every intermediate division is exact"""

    M = np.array(mat, dtype=object)
    n_rows, n_cols = M.shape
    rank, prev = 0, 1
    for c in range(n_cols):
        if rank == n_rows:
            break
        nz = [i for i in range(rank, n_rows) if M[i, c] != 0]
        if not nz:
            continue
        piv = nz[0]
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
        p = M[rank, c]
        if rank + 1 < n_rows:
            below = M[rank + 1:, c].copy()
            M[rank + 1:, c + 1:] = (M[rank + 1:, c + 1:] * p - np.outer(below, M[rank, c + 1:])) // prev
            M[rank + 1:, c] = 0
        prev = p
        rank += 1
    return rank


@lru_cache(maxsize=None)
def _prime(bits, index):
    """index-th prime below 2^bits, counting downward"""

    upper = 2 ** bits if index == 0 else _prime(bits, index - 1)
    return int(sympy.prevprime(upper))


def _eliminate_mod_p(residues, p):
    """row echelon form over GF(p); returns rank, pivot rows and pivot columns"""

    M = np.array(residues, dtype=np.int64)
    n_rows, n_cols = M.shape
    perm = np.arange(n_rows)
    cols = []
    rank = 0
    for c in range(n_cols):
        if rank == n_rows:
            break
        nz = np.flatnonzero(M[rank:, c])
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
            perm[[rank, piv]] = perm[[piv, rank]]
        inv = pow(int(M[rank, c]), p - 2, p)
        M[rank, c:] = (M[rank, c:] * inv) % p
        below = np.flatnonzero(M[rank + 1:, c])
        if below.size:
            idx = rank + 1 + below
            factors = M[idx, c]
            M[idx, c:] = (M[idx, c:] - np.outer(factors, M[rank, c:]) % p) % p
        cols.append(c)
        rank += 1
        if not M[rank:, c + 1:].any():
            break
    return rank, [int(i) for i in perm[:rank]], cols


def _log2_norms(mat):
    norms = []
    for row in mat:
        sq = sum(int(x) * int(x) for x in row)
        norms.append(0.5 * math.log2(sq) if sq else 0.0)
    return sorted(norms, reverse=True)


class _Limbs(object):
    """base-2^20 digits of an integer matrix, for fast reduction modulo many primes"""

    BITS = 20

    def __init__(self, mat):
        self.negative = np.array([[x < 0 for x in row] for row in mat], dtype=bool)
        magnitude = np.abs(mat)
        top = max(int(x).bit_length() for x in magnitude.ravel())
        mask = (1 << self.BITS) - 1
        self.digits = [((magnitude >> (self.BITS * t)) & mask).astype(np.int64)
                       for t in range(max(1, -(-top // self.BITS)))]

    def residues(self, q):
        acc = np.zeros(self.negative.shape, dtype=np.int64)
        for t, digit in enumerate(self.digits):
            acc = (acc + (digit % q) * pow(2, self.BITS * t, q)) % q
        acc[self.negative] = (q - acc[self.negative]) % q
        return acc


def _solve_mod(a11, a12, q):
    """A11^-1 A12 over GF(q), None when A11 is singular mod q"""

    k = a11.shape[0]
    aug = np.concatenate([a11, a12], axis=1) % q
    for c in range(k):
        nz = np.flatnonzero(aug[c:, c])
        if nz.size == 0:
            return None
        piv = c + int(nz[0])
        if piv != c:
            aug[[c, piv]] = aug[[piv, c]]
        aug[c] = aug[c] * pow(int(aug[c, c]), q - 2, q) % q
        factors = aug[:, c].copy()
        factors[c] = 0
        aug = (aug - np.outer(factors, aug[c]) % q) % q
    return aug[:, k:]


def _matmul_mod(a, b, q):
    # float64 products stay exact while inner * q^2 < 2^53
    chunk = max(1, int(2 ** 53 // (q * q)))
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, a.shape[1], chunk):
        part = a[:, s:s + chunk].astype(np.float64) @ b[s:s + chunk].astype(np.float64)
        out = (out + np.fmod(part, q).astype(np.int64)) % q
    return out


def modular_rank(mat):
    """certified exact rank by modular elimination

    A first elimination modulo a 31-bit prime gives ρ and a ρ×ρ block that is
    nonsingular mod p, hence over Q, so rank >= ρ. Each further prime q
    certifies rank mod q = ρ by checking that the Schur complement of that
    block vanishes mod q. Once the product of the certifying primes exceeds
    the Hadamard bound on (ρ+1)-minors, every such minor is zero and
    rank = ρ.
    """

    mat = np.array(mat, dtype=object)
    n_rows, n_cols = mat.shape
    full = min(n_rows, n_cols)
    p = _prime(31, 0)
    rho, rows, cols = _eliminate_mod_p((mat % p).astype(np.int64), p)
    if rho >= full:
        return rho

    row_bits = _log2_norms(mat)
    col_bits = _log2_norms(mat.T)

    def minor_bits(k):
        return min(sum(row_bits[:k]), sum(col_bits[:k]))

    limbs = _Limbs(mat)
    bits, index, used = 0.0, 0, 0
    while rho < full and bits <= minor_bits(rho + 1) + 1.0:
        q = _prime(21, index)
        index += 1
        res = limbs.residues(q)
        pivot_rows, pivot_cols = set(rows), set(cols)
        other_rows = [i for i in range(n_rows) if i not in pivot_rows]
        other_cols = [j for j in range(n_cols) if j not in pivot_cols]
        x = _solve_mod(res[np.ix_(rows, cols)], res[np.ix_(rows, other_cols)], q)
        if x is None:
            continue
        schur = (res[np.ix_(other_rows, other_cols)]
                 - _matmul_mod(res[np.ix_(other_rows, cols)], x, q)) % q
        if schur.any():
            # the first prime was unlucky; restart from this one's echelon form
            rho, rows, cols = _eliminate_mod_p(res, q)
            bits, used = 0.0, 0
            mylog.debug(f'modular rank raised to {rho} by prime {q}')
        bits += math.log2(q)
        used += 1
    mylog.debug(f'modular rank {rho} of {n_rows}x{n_cols} certified with {used} primes')
    return rho
