"""Monte Carlo BLER / query-count sweeps over an AWGN channel.

Every trial draws its message and noise from a generator seeded by
``(master_seed, snr_index, trial_index)``, so results do not depend on how
trials are spread across worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .codes import LinearCode
from .decoder import (
    DEFAULT_MAX_QUERIES,
    DecodeOutcome,
    HardDecoder,
    all_codewords,
    brute_force_ml,
    grandab,
    sgrandab,
    sgrandab_symbol,
)
from .modem import ChannelSpec, Modulation, add_awgn, ebn0_db, modulate, observe, symbol_posteriors

DECODERS = ("grandab", "sgrandab", "sgrandab-symbol", "ml")

CSV_COLUMNS = (
    "snr_db", "ebn0_db", "trials", "block_errors", "erasures", "bler",
    "erasure_rate", "mean_queries", "median_queries", "p90_queries", "max_queries",
)

DecoderFn = Callable[[np.ndarray, ChannelSpec], DecodeOutcome]


def make_decoder(name: str, code: LinearCode, b=DEFAULT_MAX_QUERIES) -> DecoderFn:
    """Return ``decode(y, spec) -> DecodeOutcome`` for a named decoder.

    The ``ml`` decoder reports ``2^k`` queries (one likelihood per codeword).
    """
    if name == "grandab":
        if b is None:
            return lambda y, spec: grandab(observe(y, spec).hard, code.H, None)
        hd = HardDecoder(code.H, b)
        return lambda y, spec: hd.decode(observe(y, spec).hard)
    if name == "sgrandab":
        return lambda y, spec: sgrandab(observe(y, spec), code.H, b)
    if name == "sgrandab-symbol":
        def decode(y, spec):
            if spec.modulation is not Modulation.QPSK:
                raise ValueError("sgrandab-symbol needs QPSK")
            return sgrandab_symbol(observe(y, spec), symbol_posteriors(y, spec), code.H, b)
        return decode
    if name == "ml":
        C = all_codewords(code)

        def decode(y, spec):
            word, score = brute_force_ml(observe(y, spec), code, C)
            return DecodeOutcome(word, 2**code.k, score)
        return decode
    raise ValueError(f"unknown decoder {name!r}; choose from {', '.join(DECODERS)}")


@dataclass(frozen=True)
class TrialResult:
    is_error: bool
    is_erasure: bool
    queries: int


def run_trial(code: LinearCode, modulation, decoder, snr_db: float, b=DEFAULT_MAX_QUERIES, seed=None) -> TrialResult:
    """Encode a uniform random message, send it over AWGN and decode it.

    ``decoder`` is a decoder name or a function from :func:`make_decoder`.
    ``is_error`` means a wrong codeword was returned; erasures are separate.
    """
    if isinstance(decoder, str):
        decoder = make_decoder(decoder, code, b)
    spec = ChannelSpec.from_snr(snr_db, modulation)
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 2, size=code.k, dtype=np.uint8)
    c = code.encode(u)
    y = add_awgn(modulate(c, spec), spec.sigma2, rng)
    out = decoder(y, spec)
    if out.erased:
        return TrialResult(False, True, out.queries)
    return TrialResult(not np.array_equal(out.codeword, c), False, out.queries)


@dataclass
class SweepConfig:
    code: LinearCode
    snrs: Sequence[float]
    trials: int
    modulation: Modulation = Modulation.BPSK
    decoder: str = "sgrandab"
    max_queries: int | None = DEFAULT_MAX_QUERIES
    seed: int = 0
    ebn0_convention: str = "plain"
    crc_len: int | None = None
    workers: int = 1

    def __post_init__(self):
        self.modulation = Modulation(self.modulation)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not len(self.snrs):
            raise ValueError("at least one SNR point is needed")
        if self.max_queries is not None and self.max_queries < 1:
            raise ValueError("max_queries must be >= 1 or None")
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.decoder == "sgrandab-symbol" and self.modulation is not Modulation.QPSK:
            raise ValueError("sgrandab-symbol needs QPSK")
        if self.code.n % self.modulation.bits_per_symbol:
            raise ValueError("code length must be divisible by the bits per symbol")


@dataclass
class SweepRecord:
    """Aggregate of one SNR point.

    ``bler`` counts wrong codewords and erasures.  The ``*_queries`` fields
    cover all trials, with erasures entering at the budget ``b``; the
    ``completed_*`` fields cover only trials that returned a codeword.
    """

    snr_db: float
    ebn0_db: float
    trials: int
    block_errors: int
    erasures: int
    mean_queries: float
    median_queries: float
    p90_queries: float
    max_queries: int
    completed_mean_queries: float = math.nan
    completed_median_queries: float = math.nan
    completed_p90_queries: float = math.nan
    completed_max_queries: float = math.nan

    @property
    def bler(self) -> float:
        return (self.block_errors + self.erasures) / self.trials

    @property
    def erasure_rate(self) -> float:
        return self.erasures / self.trials

    @property
    def successes(self) -> int:
        return self.trials - self.block_errors - self.erasures

    def csv_row(self) -> list[str]:
        vals = [self.snr_db, self.ebn0_db, self.trials, self.block_errors, self.erasures, self.bler,
                self.erasure_rate, self.mean_queries, self.median_queries, self.p90_queries, self.max_queries]
        return [_fmt(v) for v in vals]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def _stats(q: np.ndarray):
    if q.size == 0:
        return math.nan, math.nan, math.nan, math.nan
    return float(q.mean()), float(np.median(q)), float(np.percentile(q, 90)), int(q.max())


def aggregate(snr_db: float, ebn0: float, results: Sequence[TrialResult]) -> SweepRecord:
    q = np.array([r.queries for r in results], dtype=np.int64)
    done = np.array([r.queries for r in results if not r.is_erasure], dtype=np.int64)
    mean, med, p90, mx = _stats(q)
    cmean, cmed, cp90, cmx = _stats(done)
    return SweepRecord(
        snr_db=snr_db,
        ebn0_db=ebn0,
        trials=len(results),
        block_errors=sum(r.is_error for r in results),
        erasures=sum(r.is_erasure for r in results),
        mean_queries=mean,
        median_queries=med,
        p90_queries=p90,
        max_queries=mx,
        completed_mean_queries=cmean,
        completed_median_queries=cmed,
        completed_p90_queries=cp90,
        completed_max_queries=cmx,
    )


# Worker state for process pools: one decoder per process.
_WORKER: dict = {}


def _init_worker(config: SweepConfig):
    _WORKER["config"] = config
    _WORKER["decoder"] = make_decoder(config.decoder, config.code, config.max_queries)


def _run_chunk(task: tuple[int, int, int]) -> list[TrialResult]:
    snr_index, start, stop = task
    cfg: SweepConfig = _WORKER["config"]
    dec = _WORKER["decoder"]
    snr = cfg.snrs[snr_index]
    return [
        run_trial(cfg.code, cfg.modulation, dec, snr, cfg.max_queries, trial_seed(cfg.seed, snr_index, t))
        for t in range(start, stop)
    ]


def trial_seed(master: int, snr_index: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master, snr_index, trial_index])


def _tasks(config: SweepConfig, chunk: int):
    for i in range(len(config.snrs)):
        for start in range(0, config.trials, chunk):
            yield i, start, min(start + chunk, config.trials)


def run_sweep(config: SweepConfig, progress: Callable[[SweepRecord], None] | None = None) -> list[SweepRecord]:
    """Run every SNR point of ``config`` and return one record per point."""
    chunk = max(1, min(250, config.trials))
    tasks = list(_tasks(config, chunk))
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(config,)) as pool:
            chunks = list(pool.map(_run_chunk, tasks))
    else:
        _init_worker(config)
        try:
            chunks = [_run_chunk(t) for t in tasks]
        finally:
            _WORKER.clear()

    per_snr: list[list[TrialResult]] = [[] for _ in config.snrs]
    for (i, _, _), res in zip(tasks, chunks):
        per_snr[i].extend(res)

    crc_len = config.code.crc_len if config.crc_len is None else config.crc_len
    records = []
    for snr, results in zip(config.snrs, per_snr):
        eb = ebn0_db(snr, config.code.n, config.code.k, config.modulation.bits_per_symbol,
                     config.ebn0_convention, crc_len)
        rec = aggregate(float(snr), eb, results)
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records


def write_csv(records: Sequence[SweepRecord], sink) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(rec.csv_row())


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
