"""BPSK/QPSK modulation over AWGN and soft demodulation.

Everything probabilistic is kept in the log domain.  For both modulations a
bit's posterior depends on exactly one real component of one channel output,
so the soft observation is a pair of per-bit log posteriors plus a map from
bit to governing symbol.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import gf2

# Floor for log probabilities so saturated bits keep finite scores.
LOG_FLOOR = -700.0

SQRT_HALF = np.sqrt(0.5)


class Modulation(str, enum.Enum):
    BPSK = "bpsk"
    QPSK = "qpsk"

    @property
    def bits_per_symbol(self) -> int:
        return 1 if self is Modulation.BPSK else 2


@dataclass(frozen=True)
class ChannelSpec:
    """AWGN channel with noise variance ``sigma2`` per real dimension."""

    sigma2: float
    modulation: Modulation = Modulation.BPSK

    def __post_init__(self):
        object.__setattr__(self, "modulation", Modulation(self.modulation))
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def m(self) -> int:
        return self.modulation.bits_per_symbol

    @classmethod
    def from_snr(cls, snr_db: float, modulation=Modulation.BPSK) -> "ChannelSpec":
        return cls(snr_to_sigma2(snr_db), Modulation(modulation))


@dataclass(frozen=True)
class SoftObservation:
    """Demodulator output for one received block.

    Attributes:
        y: complex channel outputs, length ``n / m``.
        hard: hard decisions, length ``n``.
        logp0, logp1: per-bit log posteriors of the bit being 0 / 1.
        govern: index of the channel output each bit is read from.
    """

    y: np.ndarray
    hard: np.ndarray
    logp0: np.ndarray
    logp1: np.ndarray
    govern: np.ndarray

    @property
    def n(self) -> int:
        return self.hard.size

    @property
    def logp_hard(self) -> np.ndarray:
        return np.where(self.hard == 0, self.logp0, self.logp1)

    @property
    def logp_flip(self) -> np.ndarray:
        return np.where(self.hard == 0, self.logp1, self.logp0)

    @property
    def llr(self) -> np.ndarray:
        """``log p(0|y) - log p(1|y)`` per bit."""
        return self.logp0 - self.logp1

    def score(self, word) -> float:
        """Summed log posterior of ``word``, i.e. ``log p(word | y)`` up to a constant."""
        word = np.asarray(word, dtype=np.uint8)
        return float(np.sum(np.where(word == 0, self.logp0, self.logp1)))

    @classmethod
    def from_posteriors(cls, p0) -> "SoftObservation":
        """Build an observation directly from ``p(bit = 0 | y)`` values.

        Used for synthetic tests where no physical channel is involved.
        """
        p0 = np.asarray(p0, dtype=float)
        with np.errstate(divide="ignore"):
            logp0 = np.maximum(np.log(p0), LOG_FLOOR)
            logp1 = np.maximum(np.log1p(-p0), LOG_FLOOR)
        hard = (logp1 > logp0).astype(np.uint8)
        return cls(np.zeros(p0.size, complex), hard, logp0, logp1, np.arange(p0.size))


def snr_to_sigma2(snr_db: float) -> float:
    """Per-dimension noise variance for unit-energy symbols: ``10^(-SNR/10)``."""
    return float(10.0 ** (-snr_db / 10.0))


def ebn0_db(snr_db: float, n: int, k: int, m: int = 1, convention: str = "plain", crc_len: int = 0) -> float:
    """Eb/N0 in dB from SNR.

    ``plain`` uses the code rate ``k/n``; ``threegpp`` counts CRC bits as
    information, i.e. uses ``(k + crc_len)/n``.
    """
    if convention == "plain":
        info = k
    elif convention == "threegpp":
        info = k + crc_len
    else:
        raise ValueError(f"unknown Eb/N0 convention {convention!r}")
    return float(snr_db - 10.0 * np.log10(info / n) - 10.0 * np.log10(m))


def modulate(c, spec: ChannelSpec) -> np.ndarray:
    """Map bits to unit-energy symbols (bit 0 -> positive amplitude).

    QPSK is Gray mapped: bit ``2j`` drives the in-phase sign and bit
    ``2j+1`` the quadrature sign of symbol ``j``.
    """
    c = gf2.as_bits(c, 1)
    m = spec.m
    if c.size % m:
        raise ValueError(f"codeword length {c.size} not divisible by {m}")
    s = 1.0 - 2.0 * c.astype(float)
    if m == 1:
        return s.astype(complex)
    return SQRT_HALF * (s[0::2] + 1j * s[1::2])


def add_awgn(x, sigma2: float, seed=None) -> np.ndarray:
    """Add circularly symmetric Gaussian noise, variance ``sigma2`` per real dimension.

    ``seed`` may be an int, ``None`` or a ``numpy.random.Generator``.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=complex)
    sd = np.sqrt(sigma2)
    return x + sd * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))


def _binary_logposteriors(r: np.ndarray, amplitude: float, sigma2: float):
    # antipodal +-a in Gaussian noise: log p(0|r) = -log(1 + exp(-2 a r / sigma2))
    L = 2.0 * amplitude * r / sigma2
    logp0 = np.maximum(-np.logaddexp(0.0, -L), LOG_FLOOR)
    logp1 = np.maximum(-np.logaddexp(0.0, L), LOG_FLOOR)
    return logp0, logp1


def observe(y, spec: ChannelSpec) -> SoftObservation:
    """Hard decisions and per-bit posteriors under a uniform prior."""
    y = np.asarray(y, dtype=complex)
    if spec.modulation is Modulation.BPSK:
        r = y.real
        govern = np.arange(y.size)
        amp = 1.0
    else:
        r = np.empty(2 * y.size)
        r[0::2] = y.real
        r[1::2] = y.imag
        govern = np.repeat(np.arange(y.size), 2)
        amp = SQRT_HALF
    logp0, logp1 = _binary_logposteriors(r, amp, spec.sigma2)
    hard = (r < 0).astype(np.uint8)      # r == 0 resolves to bit 0
    return SoftObservation(y, hard, logp0, logp1, govern)


def qpsk_points() -> np.ndarray:
    """Constellation indexed by symbol value ``2*b0 + b1``."""
    v = np.arange(4)
    return modulate(np.column_stack([v >> 1, v & 1]).ravel(), ChannelSpec(1.0, Modulation.QPSK))


def symbol_posteriors(y, spec: ChannelSpec) -> np.ndarray:
    """Per-symbol log posteriors, shape ``(len(y), 4)``, columns by symbol value.

    Symbol value ``s = 2*b0 + b1`` where ``b0`` is the in-phase bit.
    """
    if spec.modulation is not Modulation.QPSK:
        raise ValueError("symbol-level posteriors are only defined for QPSK here")
    y = np.asarray(y, dtype=complex)
    pts = qpsk_points()
    ll = -np.abs(y[:, None] - pts[None, :]) ** 2 / (2.0 * spec.sigma2)
    ll -= np.logaddexp.reduce(ll, axis=1, keepdims=True)
    return np.maximum(ll, LOG_FLOOR)


def symbol_bits(value: int, m: int) -> tuple[int, ...]:
    """Bits of a symbol value, most significant first."""
    return tuple((value >> (m - 1 - i)) & 1 for i in range(m))
