import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nicolai.errors import ConfigError
from nicolai.fock import nicolai_supercharge, z2_supercharge
from nicolai.homology import differential_matrix
from nicolai.linalg import FieldSpec, SparseMatrix, kernel_dim, random_primes, rank

import oracles

P = FieldSpec.prime(65537)
Q_ = FieldSpec.rational()
TWO = FieldSpec.two_prime(7)
FIELDS = [P, Q_, TWO]


def dense_to_sparse(A):
    rows = len(A)
    cols = len(A[0]) if rows else 0
    return SparseMatrix.from_entries(rows, cols, ((r, c, v) for r, row in enumerate(A)
                                                  for c, v in enumerate(row) if v))


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.mode)
def test_rank_examples(field):
    zero = SparseMatrix.zeros(5, 7)
    assert rank(zero, field) == 0
    assert kernel_dim(zero, field) == 7
    eye = SparseMatrix.from_entries(3, 3, [(i, i, 1) for i in range(3)])
    assert rank(eye, field) == 3
    assert kernel_dim(eye, field) == 0
    d = differential_matrix(nicolai_supercharge(1), 3, 2)
    assert d.shape == (3, 3) and d.nnz == 1
    assert rank(d, field) == 1
    assert kernel_dim(d, field) == 2


def test_fieldspec_validation():
    with pytest.raises(ConfigError):
        FieldSpec.prime(65536)
    with pytest.raises(ConfigError):
        FieldSpec.prime(1 << 31 | 1)
    with pytest.raises(ConfigError):
        FieldSpec("two_prime", (65537,))
    with pytest.raises(ConfigError):
        FieldSpec("complex")


def test_random_primes_reproducible():
    a = random_primes(2, 3)
    assert a == random_primes(2, 3)
    assert a != random_primes(2, 4)
    lo, hi = 1 << 30, 1 << 31
    assert all(lo < p < hi for p in a) and a[0] != a[1]


def test_rank_is_field_dependent():
    # det = 2: full rank over Q, rank 1 over GF(2)
    A = SparseMatrix.from_entries(2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)])
    assert rank(A, FieldSpec.prime(2)) == 1
    assert rank(A, Q_) == 2


def test_two_prime_falls_back_to_exact():
    p1, p2 = 1073741827, 1073741831
    # determinant p1: singular mod p1 only
    A = SparseMatrix.from_entries(2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1 + p1)])
    assert rank(A, FieldSpec.prime(p1)) == 1
    assert rank(A, FieldSpec.prime(p2)) == 2
    assert rank(A, FieldSpec("two_prime", (p1, p2))) == 2


def random_matrix(rng, rows, cols, density=0.3, lo=-3, hi=3):
    return [[rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(cols)]
            for _ in range(rows)]


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 9), st.integers(1, 9))
def test_rank_matches_fraction_oracle(seed, rows, cols):
    rng = random.Random(seed)
    A = random_matrix(rng, rows, cols)
    M = dense_to_sparse(A)
    want = oracles.fraction_rank(A)
    assert rank(M, Q_) == want
    assert rank(M, TWO) == want
    assert 0 <= want <= min(rows, cols)


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 12), st.integers(1, 12))
def test_rank_transpose_and_permutation(seed, rows, cols):
    rng = random.Random(seed)
    M = dense_to_sparse(random_matrix(rng, rows, cols, density=0.4))
    rp = list(range(rows))
    cp = list(range(cols))
    rng.shuffle(rp)
    rng.shuffle(cp)
    for field in FIELDS:
        r = rank(M, field)
        assert r == rank(M.T, field)
        assert r == rank(M.permute(rp, cp), field)
        assert 0 <= r <= min(rows, cols)


def test_fraction_free_elimination_with_large_entries():
    rng = random.Random(11)
    A = random_matrix(rng, 12, 12, density=0.8, lo=-10**12, hi=10**12)
    A[11] = [a + 3 * b for a, b in zip(A[0], A[1])]
    assert rank(dense_to_sparse(A), Q_) == oracles.fraction_rank(A) == 11


@pytest.mark.parametrize("n", range(0, 11))
def test_two_primes_agree_with_rational_on_z2(n):
    Q = z2_supercharge(n)
    fields = [FieldSpec.prime(p) for p in random_primes(2, 1000 + n)]
    for d in range(n + 1):
        M = differential_matrix(Q, n, d)
        exact = rank(M, Q_)
        assert [rank(M, f) for f in fields] == [exact, exact]


def test_sparse_matrix_canonical_order_and_triplets():
    M = SparseMatrix.from_entries(3, 2, [(2, 0, 5), (0, 1, -1), (0, 0, 2)])
    assert M.entries == [(0, 0, 2), (2, 0, 5), (0, 1, -1)]
    text = M.to_triplet_text()
    assert text == "3 2 3\n1 1 2\n3 1 5\n1 2 -1\n0 0 0\n"
    assert SparseMatrix.from_triplet_text(text) == M


def test_sparse_matrix_rejects_bad_entries():
    with pytest.raises(IndexError):
        SparseMatrix.from_entries(2, 2, [(2, 0, 1)])
    with pytest.raises(ValueError):
        SparseMatrix.from_entries(2, 2, [(0, 0, 1), (0, 0, 2)])
    M = SparseMatrix.from_entries(2, 2, [(0, 0, 0)])
    assert M.nnz == 0


def test_sparse_matrix_is_immutable():
    M = SparseMatrix.from_entries(2, 2, [(0, 0, 1)])
    with pytest.raises(ValueError):
        M.val[0] = 3


def test_matmul_exact():
    A = SparseMatrix.from_entries(2, 2, [(0, 0, 1), (0, 1, 2), (1, 1, 3)])
    B = SparseMatrix.from_entries(2, 1, [(0, 0, 4), (1, 0, 5)])
    assert (A @ B).entries == [(0, 0, 14), (1, 0, 15)]
    assert np.array_equal((A @ B).to_dense(), np.array([[14], [15]], dtype=object))
