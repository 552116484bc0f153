"""Error-pattern generators, most likely pattern first.

Three orders are provided:

* :func:`hard_sequence` - Hamming-weight order, for hard-decision GRAND.
* :class:`BitSequencer` - exact likelihood order from per-bit soft
  information.  Patterns live in a max-heap; every popped pattern pushes its
  (at most two) children, where children are defined relative to the
  reliability order of the bits so that each pattern has exactly one parent
  that is at least as likely as itself.
* :class:`SymbolSequencer` - the same idea over GF(2^m) symbols, for
  channels where the bits of a modulated symbol are not independent.  Every
  pattern has up to ``n/m`` children.

Patterns are packed into ints with bit position 0 as the most significant
bit, so comparing packed patterns compares the bit tuples lexicographically.
The heap key is ``(-logscore, pattern)``: equal scores pop the
lexicographically smallest pattern first.

Each candidate also carries the packed syndrome of its flip pattern, updated
with one or two XORs per child, so a decoder never multiplies by ``H``.
"""

from __future__ import annotations

import heapq
from itertools import combinations
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class OEI(NamedTuple):
    """Bit positions ordered least reliable first.

    ``delta[j] = log p_flip - log p_keep`` for position ``indices[j]``; it is
    non-positive and non-increasing in ``j``.  Indices are 0-based.
    """

    indices: np.ndarray
    delta: np.ndarray


class Candidate(NamedTuple):
    logscore: float
    pattern: int
    jstar: int           # 1-based reliability rank of the last flipped position, 0 if none
    syndrome: int = 0
    rank: int = 0        # symbol sequencer only: OSI rank of the symbol at jstar

    def bits(self, n: int) -> tuple[int, ...]:
        return tuple((self.pattern >> (n - 1 - i)) & 1 for i in range(n))


def pack(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def compute_oei(logp_hard, logp_flip) -> OEI:
    """Sort positions by descending flip cost ``log p_flip - log p_keep``.

    For binary posteriors this is ascending posterior of the hard decision.
    Ties keep ascending position order.
    """
    delta = np.asarray(logp_flip, float) - np.asarray(logp_hard, float)
    idx = np.argsort(-delta, kind="stable")
    return OEI(idx, delta[idx])


def oei_from_observation(obs) -> OEI:
    return compute_oei(obs.logp_hard, obs.logp_flip)


# --- parent / child rules on explicit tuples --------------------------------

def jstar_of(e: Sequence[int], order: Sequence[int]) -> int:
    """1-based rank of the last nonzero entry of ``e`` along ``order``; 0 for zero."""
    for j in range(len(order), 0, -1):
        if e[order[j - 1]]:
            return j
    return 0


def children_bit(e: Sequence[int], oei: OEI) -> list[tuple[int, ...]]:
    """Children of bit pattern ``e`` (at most two)."""
    order = oei.indices
    n = len(order)
    j = jstar_of(e, order)
    if j == n:
        return []
    a = list(e)
    a[order[j]] = 1
    out = [tuple(a)]
    if j > 0:
        b = list(a)
        b[order[j - 1]] = 0
        out.append(tuple(b))
    return out


def parent_bit(e: Sequence[int], oei: OEI) -> tuple[int, ...]:
    """Parent of a nonzero bit pattern: clear rank ``j*``, set rank ``j*-1``."""
    order = oei.indices
    j = jstar_of(e, order)
    if j == 0:
        raise ValueError("the zero pattern has no parent")
    p = list(e)
    p[order[j - 1]] = 0
    if j > 1:
        p[order[j - 2]] = 1
    return tuple(p)


def hard_flip_sets(n: int) -> Iterator[tuple[int, ...]]:
    """Flipped-position sets in Hamming-weight order, lexicographic within a weight."""
    for w in range(n + 1):
        yield from combinations(range(n), w)


def hard_sequence(n: int) -> Iterator[tuple[int, ...]]:
    """All ``2^n`` bit patterns in non-decreasing Hamming weight."""
    for flips in hard_flip_sets(n):
        e = [0] * n
        for i in flips:
            e[i] = 1
        yield tuple(e)


# --- bit-level soft sequencer -----------------------------------------------

class BitSequencer:
    """Max-heap enumeration of bit flip patterns by likelihood.

    Args:
        logp_hard: per-bit log posterior of the hard decision.
        logp_flip: per-bit log posterior of the opposite value.
        column_syndromes: packed syndrome of each unit vector (optional).
        base_syndrome: packed syndrome of the hard-decision word.

    Popped candidates carry ``logscore = log p(hard XOR pattern | y)``.
    """

    def __init__(self, logp_hard, logp_flip, column_syndromes=None, base_syndrome: int = 0):
        logp_hard = np.asarray(logp_hard, float)
        self.n = n = logp_hard.size
        self.oei = compute_oei(logp_hard, logp_flip)
        order = self.oei.indices.tolist()
        self._delta = self.oei.delta.tolist()
        self._mask = [1 << (n - 1 - i) for i in order]
        if column_syndromes is None:
            self._syn = [0] * n
        else:
            self._syn = [column_syndromes[i] for i in order]
        self.base_logscore = float(np.sum(logp_hard))
        self._heap = [(-self.base_logscore, 0, 0, base_syndrome)]
        self.popped = 0

    @classmethod
    def from_observation(cls, obs, column_syndromes=None, base_syndrome: int = 0) -> "BitSequencer":
        return cls(obs.logp_hard, obs.logp_flip, column_syndromes, base_syndrome)

    def __len__(self) -> int:
        return len(self._heap)

    def frontier(self) -> set[int]:
        """Packed patterns currently waiting in the heap."""
        return {entry[1] for entry in self._heap}

    def pop(self) -> Candidate:
        """Remove the most likely pending pattern and enqueue its children."""
        heap = self._heap
        if not heap:
            raise IndexError("all 2^n patterns have been emitted")
        neg, pat, j, syn = heapq.heappop(heap)
        if j < self.n:
            neg_a = neg - self._delta[j]
            pat_a = pat ^ self._mask[j]
            syn_a = syn ^ self._syn[j]
            heapq.heappush(heap, (neg_a, pat_a, j + 1, syn_a))
            if j:
                heapq.heappush(heap, (neg_a + self._delta[j - 1], pat_a ^ self._mask[j - 1], j + 1, syn_a ^ self._syn[j - 1]))
        self.popped += 1
        return Candidate(-neg, pat, j, syn)

    def __iter__(self) -> Iterator[Candidate]:
        while self._heap:
            yield self.pop()

    def search(self, limit: float) -> tuple[Candidate | None, int]:
        """Pop until a pattern with zero syndrome appears or ``limit`` pops are spent.

        Same order as repeated :meth:`pop`, minus the per-pop overhead.

        Returns:
            (candidate or None, number of pops)
        """
        heap, delta, mask, syn_tab, n = self._heap, self._delta, self._mask, self._syn, self.n
        push, pop = heapq.heappush, heapq.heappop
        g = 0
        while heap and g < limit:
            neg, pat, j, syn = pop(heap)
            g += 1
            if syn == 0:
                self.popped += g
                return Candidate(-neg, pat, j, syn), g
            if j < n:
                neg_a = neg - delta[j]
                pat_a = pat ^ mask[j]
                syn_a = syn ^ syn_tab[j]
                push(heap, (neg_a, pat_a, j + 1, syn_a))
                if j:
                    push(heap, (neg_a + delta[j - 1], pat_a ^ mask[j - 1], j + 1, syn_a ^ syn_tab[j - 1]))
        self.popped += g
        return None, g


# --- symbol-level soft sequencer --------------------------------------------

class OSITable(NamedTuple):
    """Per-symbol candidate values, most likely first.

    ``values[i, r]`` is the rank-``r`` value of symbol ``i`` (rank 0 is the
    hard decision) and ``logp[i, r]`` its log posterior.
    """

    values: np.ndarray
    logp: np.ndarray


def compute_osi(symbol_logp, hard=None) -> OSITable:
    """Rank every symbol value by posterior; ties go to the smaller value.

    ``hard`` forces the rank-0 entry (it must be a maximiser); by default the
    smallest maximising value is used.
    """
    lp = np.asarray(symbol_logp, float)
    N, q = lp.shape
    if q < 2:
        raise ValueError("need at least two symbol values")
    values = np.empty((N, q), dtype=np.int64)
    for i in range(N):
        order = sorted(range(q), key=lambda v: (-lp[i, v], v))
        if hard is not None and order[0] != hard[i]:
            if lp[i, hard[i]] < lp[i, order[0]]:
                raise ValueError(f"symbol {i}: hard decision {hard[i]} is not a most likely value")
            order.remove(int(hard[i]))
            order.insert(0, int(hard[i]))
        values[i] = order
    return OSITable(values, np.take_along_axis(lp, values, axis=1))


def symbol_oei(osi: OSITable) -> np.ndarray:
    """Symbol positions by ascending posterior of the hard decision, ties by position."""
    return np.argsort(osi.logp[:, 0], kind="stable")


def _rank(osi: OSITable, pos: int, err: int) -> int:
    hard = osi.values[pos, 0]
    return int(np.flatnonzero(osi.values[pos] == (hard ^ err))[0])


def _err(osi: OSITable, pos: int, rank: int) -> int:
    return int(osi.values[pos, 0] ^ osi.values[pos, rank])


def children_symbol(e: Sequence[int], order: Sequence[int], osi: OSITable) -> list[tuple[int, ...]]:
    """Children of symbol error pattern ``e`` (entries are GF(q) error values).

    The symbol at rank ``j*`` advances one OSI step if it can, and every later
    symbol (still at its hard decision) may move to its second most likely
    value.
    """
    N, q = osi.values.shape
    j = jstar_of(e, order)
    out = []
    if j:
        pos = order[j - 1]
        r = _rank(osi, pos, e[pos])
        if r < q - 1:
            c = list(e)
            c[pos] = _err(osi, pos, r + 1)
            out.append(tuple(c))
    for t in range(j, N):
        pos = order[t]
        c = list(e)
        c[pos] = _err(osi, pos, 1)
        out.append(tuple(c))
    return out


def parent_symbol(e: Sequence[int], order: Sequence[int], osi: OSITable) -> tuple[int, ...]:
    """Parent of a nonzero symbol pattern: step the rank-``j*`` symbol back one OSI rank."""
    j = jstar_of(e, order)
    if j == 0:
        raise ValueError("the zero pattern has no parent")
    pos = order[j - 1]
    p = list(e)
    p[pos] = _err(osi, pos, _rank(osi, pos, e[pos]) - 1)
    return tuple(p)


class SymbolSequencer:
    """Max-heap enumeration of symbol error patterns by likelihood.

    Args:
        symbol_logp: ``(N, q)`` log posteriors indexed by symbol value.
        hard: hard symbol decisions (defaults to the per-row argmax).
        column_syndromes: packed syndromes of the ``N * log2(q)`` bit columns.
        base_syndrome: packed syndrome of the hard-decision word.

    Popped patterns are packed bit-flip masks over ``N * log2(q)`` bits, the
    bits of symbol ``i`` occupying positions ``i*m .. i*m + m - 1`` most
    significant first.
    """

    def __init__(self, symbol_logp, hard=None, column_syndromes=None, base_syndrome: int = 0):
        lp = np.asarray(symbol_logp, float)
        N, q = lp.shape
        m = q.bit_length() - 1
        if 1 << m != q:
            raise ValueError("alphabet size must be a power of two")
        self.N, self.q, self.m = N, q, m
        self.osi = compute_osi(lp, hard)
        self.order = symbol_oei(self.osi)
        nbits = N * m
        self._ds, self._mask, self._syn = [], [], []
        for pos in self.order.tolist():
            shift = nbits - m * (pos + 1)
            base_lp = self.osi.logp[pos, 0]
            ds, mk, sy = [], [], []
            for r in range(q):
                err = _err(self.osi, pos, r)
                ds.append(float(self.osi.logp[pos, r] - base_lp))
                mk.append(err << shift)
                s = 0
                if column_syndromes is not None:
                    for b in range(m):
                        if (err >> (m - 1 - b)) & 1:
                            s ^= column_syndromes[pos * m + b]
                sy.append(s)
            self._ds.append(ds)
            self._mask.append(mk)
            self._syn.append(sy)
        self.base_logscore = float(np.sum(self.osi.logp[:, 0]))
        self._heap = [(-self.base_logscore, 0, 0, base_syndrome, 0)]
        self.popped = 0

    def __len__(self) -> int:
        return len(self._heap)

    def frontier(self) -> set[int]:
        return {entry[1] for entry in self._heap}

    def pop(self) -> Candidate:
        heap = self._heap
        if not heap:
            raise IndexError("all q^N patterns have been emitted")
        neg, pat, j, syn, r = heapq.heappop(heap)
        ds, mk, sy = self._ds, self._mask, self._syn
        if j and r < self.q - 1:
            t = j - 1
            heapq.heappush(heap, (
                neg - (ds[t][r + 1] - ds[t][r]),
                pat ^ mk[t][r] ^ mk[t][r + 1],
                j,
                syn ^ sy[t][r] ^ sy[t][r + 1],
                r + 1,
            ))
        for t in range(j, self.N):
            heapq.heappush(heap, (neg - ds[t][1], pat ^ mk[t][1], t + 1, syn ^ sy[t][1], 1))
        self.popped += 1
        return Candidate(-neg, pat, j, syn, r)

    def __iter__(self) -> Iterator[Candidate]:
        while self._heap:
            yield self.pop()

    def search(self, limit: float) -> tuple[Candidate | None, int]:
        """Pop until a zero-syndrome pattern appears or ``limit`` pops are spent."""
        heap, ds, mk, sy, N, last = self._heap, self._ds, self._mask, self._syn, self.N, self.q - 1
        push, pop = heapq.heappush, heapq.heappop
        g = 0
        while heap and g < limit:
            neg, pat, j, syn, r = pop(heap)
            g += 1
            if syn == 0:
                self.popped += g
                return Candidate(-neg, pat, j, syn, r), g
            if j and r < last:
                t = j - 1
                push(heap, (neg - (ds[t][r + 1] - ds[t][r]), pat ^ mk[t][r] ^ mk[t][r + 1], j, syn ^ sy[t][r] ^ sy[t][r + 1], r + 1))
            for t in range(j, N):
                push(heap, (neg - ds[t][1], pat ^ mk[t][1], t + 1, syn ^ sy[t][1], 1))
        self.popped += g
        return None, g

    def error_symbols(self, pattern: int) -> tuple[int, ...]:
        """Unpack a packed flip mask into per-symbol error values."""
        nbits, m = self.N * self.m, self.m
        return tuple((pattern >> (nbits - m * (i + 1))) & (self.q - 1) for i in range(self.N))
