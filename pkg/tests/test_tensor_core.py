import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mixtree.tensor_core import (BAREISS_MAX_DIM, RELU_SUM, DenseTensor, MatrixView,
                                 ScalarKindError, _prime, align_to_sorted_modes, as_scalar,
                                 exact_rank,
                                 generalized_tensor_product, get_operator, inverse_permutation,
                                 kronecker, matricize, matrix_rank, modular_rank, mode_permute,
                                 tensor_product)


small_ints = arrays(np.int64, st.tuples(st.integers(1, 4), st.integers(1, 4)),
                    elements=st.integers(-3, 3))


def test_dense_tensor_infers_scalar_kind():
    t = DenseTensor([[1, 2], [3, 4]])
    assert t.dims == (2, 2)
    assert t.scalar == 'rational'
    assert t.entry((1, 0)) == 3
    assert DenseTensor([1.5, 2.0]).scalar == 'f64'
    assert DenseTensor([Fraction(1, 3), 2]).entry((0,)) == Fraction(1, 3)


def test_rational_refuses_floats():
    with pytest.raises(ScalarKindError):
        as_scalar(0.5, 'rational')
    with pytest.raises(ScalarKindError):
        DenseTensor([0.5], scalar='rational')


def test_dense_tensor_is_immutable():
    t = DenseTensor([1, 2, 3])
    with pytest.raises(ValueError):
        t.array[0] = 5


def test_tensor_product_entries():
    a = DenseTensor([1, 2])
    b = DenseTensor([3, 4, 5])
    out = tensor_product(a, b)
    assert out.dims == (2, 3)
    assert out.entry((1, 2)) == 10
    assert out.entry((0, 0)) == 3


def test_generalized_product_relu_sum():
    a = DenseTensor([1, -3])
    b = DenseTensor([1, 2])
    out = generalized_tensor_product(a, b, 'relu-sum')
    assert out.to_array().tolist() == [[2, 3], [0, 0]]


def test_mixing_scalar_kinds_fails():
    with pytest.raises(ScalarKindError):
        tensor_product(DenseTensor([1, 2]), DenseTensor([1.0, 2.0]))


def test_get_operator_aliases():
    assert get_operator('relu_sum') is RELU_SUM
    assert get_operator('ReLU-Sum') is RELU_SUM
    assert get_operator(max).name == 'max'
    with pytest.raises(KeyError):
        get_operator('maxpool')
    with pytest.raises(TypeError):
        get_operator(3)


def test_mode_permute_moves_modes():
    a = DenseTensor(np.arange(24).reshape(2, 3, 4))
    out = mode_permute(a, (2, 3, 1))
    assert out.dims == (4, 2, 3)
    for x in range(4):
        for y in range(2):
            for z in range(3):
                assert out.entry((x, y, z)) == a.entry((y, z, x))


@given(st.permutations(range(1, 5)))
def test_mode_permute_inverse(sigma):
    a = DenseTensor(np.arange(2 * 3 * 2 * 5).reshape(2, 3, 2, 5))
    back = mode_permute(mode_permute(a, sigma), inverse_permutation(sigma))
    assert back == a


def test_mode_permute_rejects_non_permutation():
    a = DenseTensor(np.zeros((2, 2), dtype=np.int64))
    with pytest.raises(ValueError):
        mode_permute(a, (1, 1))


def test_matricize_layout():
    arr = np.arange(24).reshape(2, 3, 4)
    m = matricize(DenseTensor(arr), (2,))
    assert (m.rows, m.cols) == (3, 8)
    assert m.to_array().tolist() == np.transpose(arr, (1, 0, 2)).reshape(3, 8).tolist()
    full = matricize(DenseTensor(arr), (1, 2, 3))
    assert (full.rows, full.cols) == (24, 1)


def test_matricize_rejects_unsorted_index_set():
    with pytest.raises(ValueError):
        matricize(DenseTensor(np.zeros((2, 2, 2), dtype=np.int64)), (3, 1))


@given(small_ints, small_ints)
def test_kronecker_matches_numpy(a, b):
    out = kronecker(MatrixView(a), MatrixView(b))
    assert out.to_array().tolist() == np.kron(a, b).tolist()


@settings(max_examples=40, deadline=None)
@given(small_ints, small_ints)
def test_kronecker_rank_is_multiplicative(a, b):
    ra, rb = matrix_rank(MatrixView(a)), matrix_rank(MatrixView(b))
    assert matrix_rank(kronecker(MatrixView(a), MatrixView(b))) == ra * rb


@settings(max_examples=40, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
              elements=st.integers(-4, 4)))
def test_bareiss_and_modular_agree(a):
    assert exact_rank(a, method='bareiss') == exact_rank(a, method='modular')


def test_exact_rank_of_rationals():
    m = MatrixView([[Fraction(1, 2), Fraction(1, 3)], [1, Fraction(2, 3)]])
    assert matrix_rank(m) == 1
    assert matrix_rank(MatrixView([[0, 0], [0, 0]])) == 0


def test_modular_rank_large_low_rank():
    rng = np.random.default_rng(11)
    left = np.array(rng.integers(-10**6, 10**6, size=(60, 5)), dtype=object)
    right = np.array(rng.integers(-10**6, 10**6, size=(5, 60)), dtype=object)
    m = left.dot(right)
    assert min(m.shape) > BAREISS_MAX_DIM
    assert matrix_rank(MatrixView(m)) == 5
    assert exact_rank(m, method='bareiss') == 5


def test_prime_sequence_descends():
    assert _prime(31, 0) == 2**31 - 1
    primes = [_prime(21, i) for i in range(4)]
    assert primes == sorted(primes, reverse=True) and primes[0] < 2**21
    assert all(sympy.isprime(p) for p in primes)


def test_modular_rank_survives_unlucky_prime():
    p = _prime(31, 0)
    m = np.array([[p, 0], [0, 1]], dtype=object)
    assert modular_rank(m) == 2
    m = np.array([[p, 0, 0], [0, 1, 0], [1, 1, 1]], dtype=object)
    assert modular_rank(m) == exact_rank(m, method='bareiss') == 3


def test_numeric_rank():
    assert matrix_rank(MatrixView(np.ones((3, 3))), 'numeric') == 1
    assert matrix_rank(MatrixView(np.eye(4)), 'numeric') == 4


def test_rank_mode_must_match_scalar():
    with pytest.raises(ScalarKindError):
        matrix_rank(MatrixView(np.eye(2)), 'exact')
    with pytest.raises(ScalarKindError):
        matrix_rank(MatrixView([[1, 0], [0, 1]]), 'numeric')
    with pytest.raises(ValueError):
        matrix_rank(MatrixView([[1]]), 'approximate')


def test_dense_tensor_json():
    t = DenseTensor([[Fraction(1, 2), 3], [-1, 0]])
    payload = t.to_json()
    assert payload['data'] == ['1/2', '3/1', '-1/1', '0/1']
    assert DenseTensor.from_json(payload) == t


rational_2x2 = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                        min_size=4, max_size=4).map(
    lambda v: MatrixView(np.array(v, dtype=object).reshape(2, 2)))


@settings(max_examples=40, deadline=None)
@given(rational_2x2, rational_2x2, rational_2x2, rational_2x2)
def test_kronecker_mixed_product(a, a2, b, b2):
    assert kronecker(a.matmul(a2), b.matmul(b2)) == kronecker(a, b).matmul(kronecker(a2, b2))


@settings(max_examples=30, deadline=None)
@given(arrays(np.int64, (3, 3), elements=st.integers(-3, 3)),
       arrays(np.int64, (2, 2), elements=st.integers(-3, 3)))
def test_kronecker_keeps_invertibility(a, b):
    assume(matrix_rank(MatrixView(a)) == 3 and matrix_rank(MatrixView(b)) == 2)
    assert matrix_rank(kronecker(MatrixView(a), MatrixView(b))) == 6


def test_matmul_checks_shapes():
    with pytest.raises(ValueError):
        MatrixView([[1, 2]]).matmul(MatrixView([[1, 2]]))


@pytest.mark.parametrize('case', range(30))
def test_exact_and_numeric_rank_agree(case):
    rng = np.random.default_rng(case)
    rows, cols = (int(x) for x in rng.integers(1, 33, size=2))
    k = int(rng.integers(0, min(rows, cols) + 1))
    m = rng.integers(-3, 4, size=(rows, k)) @ rng.integers(-3, 4, size=(k, cols))
    exact = matrix_rank(MatrixView(m))
    assert exact == matrix_rank(MatrixView(m.astype(np.float64)), 'numeric', tol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.lists(arrays(np.int64, st.integers(1, 3), elements=st.integers(-4, 4)),
                min_size=3, max_size=3))
def test_tensor_product_is_associative(factors):
    a, b, c = (DenseTensor(f) for f in factors)
    left = tensor_product(tensor_product(a, b), c)
    right = tensor_product(a, tensor_product(b, c))
    for size in range(1, 4):
        for items in itertools.combinations((1, 2, 3), size):
            assert matricize(left, items) == matricize(right, items)


def test_matricize_literal_example():
    a = DenseTensor(np.arange(8).reshape(2, 2, 2))
    assert matricize(a, (1, 3)).to_array().tolist() == [[0, 2], [1, 3], [4, 6], [5, 7]]


@pytest.mark.parametrize('items', [(1,), (2,), (1, 3), (2, 3), (1, 2, 3)])
def test_matricize_visits_every_entry_once(items):
    dims = (2, 3, 2)
    a = DenseTensor(np.arange(12).reshape(dims) * 7 - 5)
    m = matricize(a, items).to_array()
    rest = [i for i in (1, 2, 3) if i not in items]
    seen = np.zeros(m.shape, dtype=int)
    for d in itertools.product(*(range(s) for s in dims)):
        row = np.ravel_multi_index([d[i - 1] for i in items], [dims[i - 1] for i in items])
        col = (np.ravel_multi_index([d[i - 1] for i in rest], [dims[i - 1] for i in rest])
               if rest else 0)
        assert m[row, col] == a.entry(d)
        seen[row, col] += 1
    assert (seen == 1).all()


def test_align_to_sorted_modes_chases_labels():
    labels = (2, 4, 1, 3)
    a = DenseTensor(np.arange(16).reshape(2, 2, 2, 2))
    out = align_to_sorted_modes(a, labels)
    for e in itertools.product(range(2), repeat=4):
        # source mode i carries label labels[i], result mode k carries label k + 1
        assert out.entry(e) == a.entry(tuple(e[lab - 1] for lab in labels))
    assert align_to_sorted_modes(a, (1, 2, 3, 4)) == a
    with pytest.raises(ValueError):
        align_to_sorted_modes(a, (1, 2))
