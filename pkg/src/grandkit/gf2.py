"""Dense linear algebra over GF(2).

Matrices and vectors are numpy ``uint8`` arrays holding 0/1 entries.  The
decoders never multiply full matrices in their inner loops; they work with
packed column syndromes (see :func:`column_syndromes`), where each column of
``H`` is folded into a Python ``int`` so that a syndrome update is one XOR.
"""

from __future__ import annotations

import numpy as np


def as_bits(a, ndim: int | None = None) -> np.ndarray:
    """Coerce ``a`` to a uint8 0/1 array, rejecting anything non-binary."""
    arr = np.asarray(a)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("entries must be 0 or 1")
    arr = arr.astype(np.uint8, copy=False)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    return arr


def mat_vec_mul(H, v) -> np.ndarray:
    """Return ``H @ v^T`` over GF(2) as a vector of length ``H.shape[0]``."""
    H = as_bits(H, 2)
    v = as_bits(v, 1)
    if H.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: H has {H.shape[1]} columns, v has length {v.shape[0]}")
    return ((H.astype(np.int64) @ v) & 1).astype(np.uint8)


def mat_mul(A, B) -> np.ndarray:
    """GF(2) matrix product."""
    A = as_bits(A, 2)
    B = as_bits(B, 2)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    return ((A.astype(np.int64) @ B) & 1).astype(np.uint8)


def encode(G, u) -> np.ndarray:
    """Return the codeword ``u @ G`` over GF(2)."""
    G = as_bits(G, 2)
    u = as_bits(u, 1)
    if u.shape[0] != G.shape[0]:
        raise ValueError(f"dimension mismatch: message length {u.shape[0]}, G has {G.shape[0]} rows")
    return ((u.astype(np.int64) @ G) & 1).astype(np.uint8)


def rref(M) -> tuple[np.ndarray, list[int], int]:
    """Reduced row-echelon form over GF(2).

    Returns:
        (R, pivot_columns, rank).  ``R`` has the same shape as ``M``; rows
        below ``rank`` are zero.
    """
    R = as_bits(M, 2).copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        hits = np.flatnonzero(R[:, c])
        hits = hits[hits != r]
        R[hits] ^= R[r]
        pivots.append(c)
        r += 1
    return R, pivots, len(pivots)


def rank(M) -> int:
    return rref(M)[2]


def parity_from_generator(G) -> np.ndarray:
    """Build a parity-check matrix ``H`` with ``G @ H^T = 0``.

    ``G`` is brought to systematic form ``[I_k | P]`` under a column
    permutation, ``H = [P^T | I_{n-k}]`` is formed, and the permutation is
    undone so that ``H`` indexes bits in the original transmitted order.

    Raises:
        ValueError: if ``G`` does not have full row rank.
    """
    G = as_bits(G, 2)
    k, n = G.shape
    R, pivots, r = rref(G)
    if r != k:
        raise ValueError(f"generator matrix is rank deficient (rank {r} < {k})")
    rest = [c for c in range(n) if c not in set(pivots)]
    P = R[:, rest]
    H = np.zeros((n - k, n), dtype=np.uint8)
    H[:, pivots] = P.T
    H[:, rest] = np.eye(n - k, dtype=np.uint8)
    return H


def syndrome(H, v) -> np.ndarray:
    return mat_vec_mul(H, v)


# --- packed helpers -------------------------------------------------------

def pack_bits(v) -> int:
    """Pack a bit vector into an int, element 0 in the most significant bit."""
    out = 0
    for b in np.asarray(v, dtype=np.uint8).tolist():
        out = (out << 1) | b
    return out


def unpack_bits(x: int, n: int) -> np.ndarray:
    """Inverse of :func:`pack_bits` for a length-``n`` vector."""
    return np.array([(x >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def column_syndromes(H) -> list[int]:
    """Per-column packed syndromes: ``H @ e_j^T`` for each unit vector ``e_j``."""
    H = as_bits(H, 2)
    return [pack_bits(H[:, j]) for j in range(H.shape[1])]


def packed_syndrome(col_syn: list[int], v) -> int:
    """Syndrome of ``v`` as a packed int, from :func:`column_syndromes`."""
    s = 0
    for j in np.flatnonzero(np.asarray(v)):
        s ^= col_syn[j]
    return s
