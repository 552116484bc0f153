import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grandkit import gf2

# Hamming [7,4] with column j equal to j+1 in binary (MSB in row 0).
H_STD = np.array([[(j >> (2 - r)) & 1 for j in range(1, 8)] for r in range(3)], dtype=np.uint8)
# A generator for the same code, found independently of H_STD.
G_STD = np.array([
    [1, 1, 1, 0, 0, 0, 0],
    [1, 0, 0, 1, 1, 0, 0],
    [0, 1, 0, 1, 0, 1, 0],
    [1, 1, 0, 1, 0, 0, 1],
], dtype=np.uint8)


def span(rows):
    """All GF(2) combinations of ``rows`` by brute force."""
    rows = [np.asarray(r, dtype=np.uint8) for r in rows]
    out = set()
    width = rows[0].size if rows else 0
    for coeffs in itertools.product((0, 1), repeat=len(rows)):
        v = np.zeros(width, dtype=np.uint8)
        for c, r in zip(coeffs, rows):
            if c:
                v ^= r
        out.add(tuple(v.tolist()))
    return out


def random_full_rank(rng, k, n):
    while True:
        G = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if gf2.rank(G) == k:
            return G


def test_hamming_codeword_has_zero_syndrome():
    v = np.array([1, 0, 1, 0, 1, 0, 1], dtype=np.uint8)
    assert tuple(v.tolist()) in span(G_STD)
    assert gf2.mat_vec_mul(H_STD, v).tolist() == [0, 0, 0]


def test_identity_and_zero_vector():
    assert gf2.mat_vec_mul(np.eye(3, dtype=np.uint8), [1, 0, 1]).tolist() == [1, 0, 1]
    H = np.random.default_rng(3).integers(0, 2, size=(4, 9))
    assert not gf2.mat_vec_mul(H, np.zeros(9, dtype=np.uint8)).any()


def test_mat_vec_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        gf2.mat_vec_mul(H_STD, np.zeros(6, dtype=np.uint8))


def test_rejects_non_binary():
    with pytest.raises(ValueError):
        gf2.as_bits([0, 2, 1])


def test_rref_examples():
    R, piv, r = gf2.rref(np.eye(4, dtype=np.uint8))
    assert np.array_equal(R, np.eye(4)) and piv == [0, 1, 2, 3] and r == 4
    R, piv, r = gf2.rref([[1, 1], [1, 1]])
    assert R.tolist() == [[1, 1], [0, 0]] and piv == [0] and r == 1


def test_rref_preserves_row_space():
    M = random_full_rank(np.random.default_rng(11), 6, 10)
    R, piv, r = gf2.rref(M)
    assert r == 6
    assert span(M) == span(R)
    assert piv == sorted(piv)
    # pivot columns are unit vectors in the reduced form
    for row, c in enumerate(piv):
        assert R[:, c].tolist() == [int(i == row) for i in range(6)]


def test_parity_from_systematic_hamming():
    P = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=np.uint8)
    G = np.hstack([np.eye(4, dtype=np.uint8), P])
    H = gf2.parity_from_generator(G)
    assert np.array_equal(H, np.hstack([P.T, np.eye(3, dtype=np.uint8)]))
    assert not gf2.mat_mul(G, H.T).any()


def test_parity_from_identity_is_empty():
    H = gf2.parity_from_generator(np.eye(5, dtype=np.uint8))
    assert H.shape == (0, 5)
    assert gf2.mat_vec_mul(H, [1, 0, 1, 1, 0]).size == 0


def test_parity_from_random_generator_exhaustive():
    G = random_full_rank(np.random.default_rng(5), 5, 10)
    H = gf2.parity_from_generator(G)
    assert H.shape == (5, 10) and gf2.rank(H) == 5
    for u in itertools.product((0, 1), repeat=5):
        assert not gf2.mat_vec_mul(H, gf2.encode(G, u)).any()


def test_parity_from_generator_needs_permutation():
    # pivots of this G are not the leading columns
    G = np.array([[0, 1, 1, 0, 1], [0, 0, 1, 1, 1]], dtype=np.uint8)
    H = gf2.parity_from_generator(G)
    assert not gf2.mat_mul(G, H.T).any() and gf2.rank(H) == 3


def test_parity_rank_deficient():
    with pytest.raises(ValueError):
        gf2.parity_from_generator([[1, 0, 1], [1, 0, 1]])


def test_encode_examples():
    assert not gf2.encode(G_STD, [0, 0, 0, 0]).any()
    for j in range(4):
        e = np.zeros(4, dtype=np.uint8)
        e[j] = 1
        assert np.array_equal(gf2.encode(G_STD, e), G_STD[j])
    c = gf2.encode(G_STD, [1, 0, 1, 1])
    assert not gf2.mat_vec_mul(gf2.parity_from_generator(G_STD), c).any()
    with pytest.raises(ValueError):
        gf2.encode(G_STD, [1, 0, 1])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_encoded_words_have_zero_syndrome(k, extra, seed):
    n = k + extra
    G = random_full_rank(np.random.default_rng(seed), k, n)
    H = gf2.parity_from_generator(G)
    for u in itertools.product((0, 1), repeat=k):
        assert not gf2.mat_vec_mul(H, gf2.encode(G, u)).any()


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_non_codewords_have_nonzero_syndrome(k, extra, seed):
    n = k + extra
    G = random_full_rank(np.random.default_rng(seed), k, n)
    H = gf2.parity_from_generator(G)
    book = span(G)
    for v in itertools.product((0, 1), repeat=n):
        assert gf2.mat_vec_mul(H, v).any() == (v not in book)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_rref_idempotent(rows, cols, seed):
    M = np.random.default_rng(seed).integers(0, 2, size=(rows, cols))
    R = gf2.rref(M)[0]
    assert np.array_equal(gf2.rref(R)[0], R)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_mat_vec_mul_is_linear(rows, cols, seed):
    rng = np.random.default_rng(seed)
    H = rng.integers(0, 2, size=(rows, cols))
    a, b = rng.integers(0, 2, size=(2, cols)).astype(np.uint8)
    assert np.array_equal(gf2.mat_vec_mul(H, a ^ b), gf2.mat_vec_mul(H, a) ^ gf2.mat_vec_mul(H, b))


def test_packed_syndrome_matches_product():
    rng = np.random.default_rng(2)
    H = rng.integers(0, 2, size=(9, 30))
    cols = gf2.column_syndromes(H)
    for _ in range(50):
        v = rng.integers(0, 2, size=30).astype(np.uint8)
        assert gf2.packed_syndrome(cols, v) == gf2.pack_bits(gf2.mat_vec_mul(H, v))
    assert np.array_equal(gf2.unpack_bits(gf2.pack_bits(v), 30), v)
