"""GRAND-family decoders and a brute-force ML reference.

All decoders test codebook membership through packed syndromes: the
syndrome of ``hard XOR e`` is ``syn(hard) XOR syn(e)``, and the sequencers
keep ``syn(e)`` up to date incrementally.  ``queries`` counts membership
tests exactly, so a decoder that succeeds on its first guess reports 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gf2
from .codes import LinearCode
from .modem import SoftObservation
from .sequencer import BitSequencer, SymbolSequencer, hard_flip_sets

DEFAULT_MAX_QUERIES = 10**6
ML_MAX_K = 20


@dataclass(frozen=True)
class DecodeOutcome:
    """Decoded word (``None`` on erasure), membership queries used and its log score."""

    codeword: np.ndarray | None
    queries: int
    logscore: float | None = None

    @property
    def erased(self) -> bool:
        return self.codeword is None


def _limit(b) -> float:
    if b is None:
        return math.inf
    if b < 1:
        raise ValueError("the query budget must be at least 1")
    return b


def _check_dims(n: int, H: np.ndarray):
    if H.shape[1] != n:
        raise ValueError(f"dimension mismatch: word length {n}, H has {H.shape[1]} columns")


def _apply(hard: np.ndarray, pattern: int) -> np.ndarray:
    return hard ^ gf2.unpack_bits(pattern, hard.size)


def grandab(hard, H, b=DEFAULT_MAX_QUERIES) -> DecodeOutcome:
    """Hard-detection GRAND with abandonment after ``b`` queries (``None``: never).

    Noise patterns are tried in Hamming-weight order.
    """
    hard = gf2.as_bits(hard, 1)
    H = gf2.as_bits(H, 2) if np.size(H) else np.zeros((0, hard.size), np.uint8)
    _check_dims(hard.size, H)
    limit = _limit(b)
    cols = gf2.column_syndromes(H)
    s0 = gf2.packed_syndrome(cols, hard)
    g = 0
    for flips in hard_flip_sets(hard.size):
        if g >= limit:
            break
        g += 1
        s = s0
        for i in flips:
            s ^= cols[i]
        if s == 0:
            word = hard.copy()
            word[list(flips)] ^= 1
            return DecodeOutcome(word, g)
    return DecodeOutcome(None, g)


class HardDecoder:
    """GRANDAB for repeated use with one code and budget.

    The weight-ordered guesses do not depend on the received word, so the
    first ``b`` of them are enumerated once and indexed by syndrome.  The
    query count of a decode is then the position of the first guess whose
    syndrome matches the received word's; results are identical to
    :func:`grandab`.
    """

    def __init__(self, H, b=DEFAULT_MAX_QUERIES):
        self.H = gf2.as_bits(H, 2)
        self.n = self.H.shape[1]
        self.b = _limit(b)
        if math.isinf(self.b):
            raise ValueError("HardDecoder needs a finite budget; use grandab() for b=None")
        self.cols = gf2.column_syndromes(self.H)

    @cached_property
    def _first_hit(self) -> dict[int, tuple[int, tuple[int, ...]]]:
        table: dict[int, tuple[int, tuple[int, ...]]] = {}
        cols = self.cols
        for g, flips in enumerate(hard_flip_sets(self.n), start=1):
            if g > self.b:
                break
            s = 0
            for i in flips:
                s ^= cols[i]
            table.setdefault(s, (g, flips))
        return table

    def decode(self, hard) -> DecodeOutcome:
        hard = gf2.as_bits(hard, 1)
        _check_dims(hard.size, self.H)
        hit = self._first_hit.get(gf2.packed_syndrome(self.cols, hard))
        if hit is None:
            return DecodeOutcome(None, int(min(self.b, 2**self.n)))
        g, flips = hit
        word = hard.copy()
        word[list(flips)] ^= 1
        return DecodeOutcome(word, g)


def sgrandab(obs: SoftObservation, H, b=DEFAULT_MAX_QUERIES, trace: list | None = None) -> DecodeOutcome:
    """Soft-detection GRAND with abandonment, bit-level likelihood order.

    The first codeword found is a maximum-likelihood codeword.  If ``trace``
    is a list, every queried :class:`~grandkit.sequencer.Candidate` is
    appended to it.
    """
    hard = obs.hard
    H = gf2.as_bits(H, 2) if np.size(H) else np.zeros((0, hard.size), np.uint8)
    _check_dims(hard.size, H)
    limit = _limit(b)
    cols = gf2.column_syndromes(H)
    seq = BitSequencer(obs.logp_hard, obs.logp_flip, cols, gf2.packed_syndrome(cols, hard))
    cand, g = _run(seq, limit, trace)
    if cand is None:
        return DecodeOutcome(None, g)
    word = _apply(hard, cand.pattern)
    return DecodeOutcome(word, g, obs.score(word))


def _run(seq, limit, trace):
    if trace is None:
        return seq.search(limit)
    g = 0
    while len(seq) and g < limit:
        cand = seq.pop()
        g += 1
        trace.append(cand)
        if cand.syndrome == 0:
            return cand, g
    return None, g


def sgrandab_symbol(obs: SoftObservation, symbol_logp, H, b=DEFAULT_MAX_QUERIES, trace: list | None = None) -> DecodeOutcome:
    """Soft-detection GRAND over modulation symbols.

    Args:
        obs: bit-level observation (supplies the hard word).
        symbol_logp: ``(n/m, 2^m)`` log posteriors by symbol value, where a
            symbol's value packs its bits most significant first.
        H: parity-check matrix over the ``n`` bits.
        b: query budget, ``None`` for unbounded.

    The returned ``logscore`` is the summed symbol log posterior of the word.
    """
    hard = obs.hard
    lp = np.asarray(symbol_logp, float)
    N, q = lp.shape
    m = q.bit_length() - 1
    if N * m != hard.size:
        raise ValueError(f"symbol table covers {N * m} bits, word has {hard.size}")
    H = gf2.as_bits(H, 2) if np.size(H) else np.zeros((0, hard.size), np.uint8)
    _check_dims(hard.size, H)
    limit = _limit(b)
    hard_sym = hard.reshape(N, m) @ (1 << np.arange(m - 1, -1, -1))
    cols = gf2.column_syndromes(H)
    seq = SymbolSequencer(lp, hard_sym, cols, gf2.packed_syndrome(cols, hard))
    cand, g = _run(seq, limit, trace)
    if cand is None:
        return DecodeOutcome(None, g)
    word = _apply(hard, cand.pattern)
    return DecodeOutcome(word, g, symbol_score(lp, word))


def symbol_score(symbol_logp, word) -> float:
    lp = np.asarray(symbol_logp, float)
    N, q = lp.shape
    m = q.bit_length() - 1
    vals = np.asarray(word, dtype=np.int64).reshape(N, m) @ (1 << np.arange(m - 1, -1, -1))
    return float(lp[np.arange(N), vals].sum())


def all_codewords(code: LinearCode) -> np.ndarray:
    """Every codeword, ordered by message in binary counting order."""
    if code.k > ML_MAX_K:
        raise ValueError(f"k = {code.k} is too large for exhaustive enumeration (max {ML_MAX_K})")
    k = code.k
    U = ((np.arange(2**k)[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8)
    return ((U.astype(np.int64) @ code.G) & 1).astype(np.uint8)


def brute_force_ml(obs: SoftObservation, code: LinearCode, codewords: np.ndarray | None = None):
    """Exhaustive ML decoding: the codeword with the largest summed log posterior.

    Exact score ties return the lexicographically smallest codeword.

    Returns:
        (codeword, logscore)
    """
    C = all_codewords(code) if codewords is None else codewords
    if C.shape[1] != obs.n:
        raise ValueError("observation length does not match the code")
    scores = np.where(C == 0, obs.logp0, obs.logp1).sum(axis=1)
    best = np.flatnonzero(scores == scores.max())
    if best.size > 1:
        tied = C[best]
        best = best[np.lexsort(tied.T[::-1])]
    i = best[0]
    return C[i].copy(), float(obs.score(C[i]))
