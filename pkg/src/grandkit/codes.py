"""Binary linear block codes: constructors and a small text file format.

A code is held as a :class:`LinearCode` carrying both its generator and
parity-check matrices.  CRC-aided polar codes are built as a single linear
code, ``G = G_crc @ M_interleave @ G_polar``, which is all a GRAND decoder
needs to know about them.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import gf2

FILE_MAGIC = "grandcode v1"

# Polynomials are written highest degree first, leading 1 included.
CRC_POLYNOMIALS = {
    "crc3": (1, 0, 1, 1),                                # x^3 + x + 1
    "crc6": (1, 1, 0, 0, 0, 0, 1),                       # 5G CRC6: x^6 + x^5 + 1
    "crc11": (1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1),       # 5G CRC11: x^11 + x^10 + x^9 + x^5 + 1
}


class CodeFormatError(ValueError):
    """Raised when a code file cannot be parsed or is inconsistent."""


@dataclass(frozen=True, eq=False)
class LinearCode:
    """An ``[n, k]`` binary linear code.

    The constructor checks that ``G`` has rank ``k``, ``H`` has rank ``n - k``
    and ``G @ H^T = 0``.  ``crc_len`` records how many of the ``k`` dimensions
    are consumed by an outer CRC (0 for plain codes); it only matters for the
    3GPP Eb/N0 convention.
    """

    G: np.ndarray
    H: np.ndarray
    label: str = "code"
    crc_len: int = 0
    n: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        G = gf2.as_bits(self.G, 2)
        k, n = G.shape
        H = gf2.as_bits(self.H, 2) if np.size(self.H) else np.zeros((0, n), dtype=np.uint8)
        if H.ndim != 2 or H.shape[1] != n:
            raise ValueError(f"H has shape {H.shape}, expected (n-k, {n})")
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
        if H.shape[0] != n - k:
            raise ValueError(f"H has {H.shape[0]} rows, expected {n - k}")
        if gf2.rank(G) != k:
            raise ValueError("G is not full rank")
        if n > k and gf2.rank(H) != n - k:
            raise ValueError("H is not full rank")
        if n > k and gf2.mat_mul(G, H.T).any():
            raise ValueError("G @ H^T != 0")
        if any(ch.isspace() for ch in self.label) or not self.label:
            raise ValueError("label must be a non-empty token without whitespace")
        G.setflags(write=False)
        H.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_generator(cls, G, label: str = "code", crc_len: int = 0) -> "LinearCode":
        return cls(gf2.as_bits(G, 2), gf2.parity_from_generator(G), label, crc_len)

    def encode(self, u) -> np.ndarray:
        return gf2.encode(self.G, u)

    def syndrome(self, v) -> np.ndarray:
        return gf2.mat_vec_mul(self.H, v)

    def is_codeword(self, v) -> bool:
        return not self.syndrome(v).any()

    def __eq__(self, other):
        if not isinstance(other, LinearCode):
            return NotImplemented
        return (
            self.label == other.label
            and self.crc_len == other.crc_len
            and np.array_equal(self.G, other.G)
            and np.array_equal(self.H, other.H)
        )

    __hash__ = None


def hamming_code(r: int) -> LinearCode:
    """The ``[2^r - 1, 2^r - 1 - r]`` Hamming code in systematic form."""
    if r < 2:
        raise ValueError("Hamming codes need r >= 2")
    n = 2**r - 1
    k = n - r
    cols = [c for c in range(1, n + 1) if c & (c - 1)]     # weight >= 2 patterns
    P = np.array([[(c >> (r - 1 - i)) & 1 for i in range(r)] for c in cols], dtype=np.uint8).reshape(k, r)
    G = np.hstack([np.eye(k, dtype=np.uint8), P])
    H = np.hstack([P.T, np.eye(r, dtype=np.uint8)])
    return LinearCode(G, H, f"hamming:r={r}")


def poly_degree(poly) -> int:
    poly = list(poly)
    if not poly or poly[0] != 1:
        raise ValueError("polynomial must be given highest degree first with a leading 1")
    return len(poly) - 1


def crc_remainder(bits, poly) -> np.ndarray:
    """Remainder of ``bits(x) * x^d mod poly(x)``; ``bits[0]`` is the highest power."""
    d = poly_degree(poly)
    reg = list(np.asarray(bits, dtype=np.uint8).tolist()) + [0] * d
    for i in range(len(reg) - d):
        if reg[i]:
            for j, c in enumerate(poly):
                reg[i + j] ^= c
    return np.array(reg[len(reg) - d:], dtype=np.uint8)


def crc_generator(k: int, poly) -> np.ndarray:
    """``k x (k + d)`` generator mapping ``u`` to ``[u | crc(u)]``.

    Message bits are taken highest power first (``u[0]`` multiplies
    ``x^(k-1)``), which is the usual serial CRC bit order.
    """
    d = poly_degree(poly)
    if d < 1:
        raise ValueError("CRC polynomial must have degree >= 1")
    if k < 1:
        raise ValueError("k must be positive")
    G = np.zeros((k, k + d), dtype=np.uint8)
    G[:, :k] = np.eye(k, dtype=np.uint8)
    for i in range(k):
        G[i, k:] = crc_remainder(G[i, :k], poly)
    return G


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def polar_transform(n: int) -> np.ndarray:
    """The ``n x n`` Arikan kernel power ``F^{(x)log2 n}``, ``F = [[1,0],[1,1]]``."""
    if not _is_power_of_two(n):
        raise ValueError(f"polar length must be a power of 2, got {n}")
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    out = np.ones((1, 1), dtype=np.uint8)
    while out.shape[0] < n:
        out = np.kron(out, F)
    return out


def bhattacharyya_parameters(n: int, design_snr_db: float) -> np.ndarray:
    """Bhattacharyya bounds of the ``n`` synthetic channels, natural index order.

    Starts from ``exp(-Es/N0)`` for BPSK at the design SNR and splits each
    channel into a worse ``2z - z^2`` and better ``z^2`` branch.
    """
    if not _is_power_of_two(n):
        raise ValueError(f"polar length must be a power of 2, got {n}")
    z = np.array([np.exp(-(10.0 ** (design_snr_db / 10.0)))])
    while z.size < n:
        z = np.column_stack([2 * z - z * z, z * z]).ravel()
    return z


def polar_generator(n: int, k: int, design_snr_db: float = 0.0) -> tuple[np.ndarray, list[int]]:
    """Rows of the polar transform for the ``k`` most reliable channels.

    Returns:
        (G_polar, frozen) with ``G_polar`` of shape ``(k, n)`` (rows in
        increasing channel index) and ``frozen`` the sorted unused indices.
        Reliability ties go to the higher index.
    """
    if not _is_power_of_two(n):
        raise ValueError(f"polar length must be a power of 2, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    z = bhattacharyya_parameters(n, design_snr_db)
    order = sorted(range(n), key=lambda i: (z[i], -i))
    info = sorted(order[:k])
    frozen = sorted(order[k:])
    return polar_transform(n)[info], frozen


def interleaver_matrix(perm) -> np.ndarray:
    """Permutation matrix ``M`` with ``(w @ M)[j] = w[perm[j]]``."""
    perm = np.asarray(perm, dtype=np.intp)
    L = perm.size
    if sorted(perm.tolist()) != list(range(L)):
        raise ValueError("interleaver must be a permutation")
    M = np.zeros((L, L), dtype=np.uint8)
    M[perm, np.arange(L)] = 1
    return M


def ca_polar_code(
    n: int,
    k: int,
    poly="crc11",
    interleave=None,
    design_snr_db: float = 0.0,
) -> LinearCode:
    """CRC-aided polar code collapsed into one linear code.

    The message is CRC-extended, optionally interleaved (identity by default)
    and polar encoded with ``k + d`` information channels.  No rate matching
    is applied, so ``n`` must be a power of 2.
    """
    name = poly if isinstance(poly, str) else None
    if name is not None:
        poly = CRC_POLYNOMIALS[name]
    d = poly_degree(poly)
    if k + d > n:
        raise ValueError(f"k + crc length = {k + d} exceeds n = {n}")
    G_crc = crc_generator(k, poly)
    M = interleaver_matrix(np.arange(k + d) if interleave is None else interleave)
    G_pol, _ = polar_generator(n, k + d, design_snr_db)
    G = gf2.mat_mul(gf2.mat_mul(G_crc, M), G_pol)
    if gf2.rank(G) != k:
        raise ValueError("composite generator is rank deficient")
    poly_txt = "".join(str(c) for c in poly)
    label = f"capolar:n={n},k={k},crc={name or 'custom'},poly={poly_txt},crc_len={d}"
    return LinearCode.from_generator(G, label, crc_len=d)


def random_linear_code(n: int, k: int, seed: int = 0) -> LinearCode:
    """Systematic ``[I_k | R]`` code with ``R`` drawn from a seeded generator."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    R = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    G = np.hstack([np.eye(k, dtype=np.uint8), R])
    H = np.hstack([R.T, np.eye(n - k, dtype=np.uint8)])
    return LinearCode(G, H, f"random:n={n},k={k},seed={seed}")


def polar_code(n: int, k: int, design_snr_db: float = 0.0) -> LinearCode:
    G, _ = polar_generator(n, k, design_snr_db)
    return LinearCode.from_generator(G, f"polar:n={n},k={k}")


# --- persistence ----------------------------------------------------------

def _rows(M: np.ndarray) -> list[str]:
    return ["".join("1" if b else "0" for b in row) for row in M]


def save_code(code: LinearCode, sink: TextIO | str) -> None:
    """Write ``code`` in the ``grandcode v1`` text format."""
    lines = [FILE_MAGIC, f"{code.n} {code.k} {code.label}", "G", *_rows(code.G), "H", *_rows(code.H)]
    text = "\n".join(lines) + "\n"
    if isinstance(sink, str):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)


def dumps_code(code: LinearCode) -> str:
    buf = io.StringIO()
    save_code(code, buf)
    return buf.getvalue()


def _parse_rows(lines: list[str], count: int, n: int, what: str) -> np.ndarray:
    if len(lines) < count:
        raise CodeFormatError(f"{what}: expected {count} rows, found {len(lines)}")
    out = np.zeros((count, n), dtype=np.uint8)
    for r, line in enumerate(lines[:count]):
        if len(line) != n:
            raise CodeFormatError(f"{what} row {r}: length {len(line)} != n={n}")
        if set(line) - {"0", "1"}:
            raise CodeFormatError(f"{what} row {r}: non-binary character")
        out[r] = [ch == "1" for ch in line]
    return out


def load_code(source: TextIO | str) -> LinearCode:
    """Parse a ``grandcode v1`` file (path or open text stream)."""
    if isinstance(source, str):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source.read()
    return loads_code(text)


def loads_code(text: str) -> LinearCode:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln.rstrip("\r") for ln in lines]
    if not lines or lines[0].strip() != FILE_MAGIC:
        raise CodeFormatError(f"missing '{FILE_MAGIC}' header")
    if len(lines) < 3:
        raise CodeFormatError("truncated header")
    parts = lines[1].split()
    if len(parts) != 3:
        raise CodeFormatError("second line must be 'n k label'")
    try:
        n, k = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise CodeFormatError("n and k must be integers") from exc
    label = parts[2]
    if not 1 <= k <= n:
        raise CodeFormatError(f"invalid dimensions n={n}, k={k}")
    if lines[2] != "G":
        raise CodeFormatError("expected 'G' marker on line 3")
    G = _parse_rows(lines[3:], k, n, "G")
    pos = 3 + k
    if pos >= len(lines) or lines[pos] != "H":
        raise CodeFormatError("expected 'H' marker after G rows")
    H = _parse_rows(lines[pos + 1:], n - k, n, "H")
    if len(lines) != pos + 1 + n - k:
        raise CodeFormatError("trailing content after H rows")
    m = re.search(r"crc_len=(\d+)", label)
    try:
        return LinearCode(G, H, label, int(m.group(1)) if m else 0)
    except ValueError as exc:
        raise CodeFormatError(f"inconsistent code: {exc}") from exc
