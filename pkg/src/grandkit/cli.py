"""Command line interface: ``grandkit {gen-code,encode,decode,simulate}``.

Exit status is 0 on success, 1 on usage errors and 2 on bad input data.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import codes
from .decoder import DEFAULT_MAX_QUERIES
from .modem import ChannelSpec, Modulation
from .simulate import DECODERS, SweepConfig, make_decoder, run_sweep, write_csv


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_code_spec(text: str) -> codes.LinearCode:
    """Build a code from ``hamming:R``, ``random:N:K[:SEED]``, ``polar:N:K`` or ``capolar:N:K[:CRC]``."""
    kind, *args = text.split(":")
    try:
        if kind == "hamming" and len(args) == 1:
            return codes.hamming_code(int(args[0]))
        if kind == "random" and len(args) in (2, 3):
            return codes.random_linear_code(int(args[0]), int(args[1]), int(args[2]) if len(args) == 3 else 0)
        if kind == "polar" and len(args) == 2:
            return codes.polar_code(int(args[0]), int(args[1]))
        if kind == "capolar" and len(args) in (2, 3):
            return codes.ca_polar_code(int(args[0]), int(args[1]), args[2] if len(args) == 3 else "crc11")
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad code spec {text!r}: {exc}") from exc
    raise UsageError(f"bad code spec {text!r}")


def parse_snrs(args) -> list[float]:
    if args.snr_list is not None:
        try:
            return [float(s) for s in args.snr_list.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --snr-list: {args.snr_list}") from exc
    try:
        start, stop, step = (float(s) for s in args.snr.split(":"))
    except ValueError as exc:
        raise UsageError(f"--snr expects start:stop:step, got {args.snr!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError("--snr needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def parse_budget(text: str):
    if text.lower() in ("inf", "none", "unbounded"):
        return None
    try:
        b = int(float(text))
    except ValueError as exc:
        raise UsageError(f"bad --max-queries {text!r}") from exc
    if b < 1:
        raise UsageError("--max-queries must be >= 1 or inf")
    return b


def load_selected_code(args) -> codes.LinearCode:
    if args.code_file:
        try:
            return codes.load_code(args.code_file)
        except OSError as exc:
            raise DataError(f"cannot read {args.code_file}: {exc}") from exc
        except codes.CodeFormatError as exc:
            raise DataError(f"{args.code_file}: {exc}") from exc
    if args.code:
        return parse_code_spec(args.code)
    raise UsageError("one of --code or --code-file is required")


def _add_code_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--code", help="builtin code, e.g. hamming:3, random:12:6:1, capolar:64:46")
    g.add_argument("--code-file", help="code in grandcode v1 format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grandkit", description="GRAND-family decoding toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen-code", help="write a code file")
    p.add_argument("--kind", required=True, choices=["hamming", "random", "polar", "capolar"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int, help="Hamming redundancy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crc", default="crc11", choices=sorted(codes.CRC_POLYNOMIALS))
    p.add_argument("--design-snr", type=float, default=0.0)
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("encode", help="encode messages given as bit strings")
    _add_code_args(p)
    p.add_argument("--message", action="append", default=[], help="message bits, repeatable")
    p.add_argument("--input", help="file with one message per line")

    p = sub.add_parser("decode", help="decode received blocks")
    _add_code_args(p)
    p.add_argument("--mod", default="bpsk", choices=[m.value for m in Modulation])
    p.add_argument("--decoder", default="sgrandab", choices=DECODERS)
    noise = p.add_mutually_exclusive_group(required=True)
    noise.add_argument("--snr", type=float, help="channel SNR in dB")
    noise.add_argument("--sigma2", type=float, help="noise variance per real dimension")
    p.add_argument("--max-queries", default=str(DEFAULT_MAX_QUERIES))
    p.add_argument("--input", required=True,
                   help="one block per line: n real values (QPSK: I and Q interleaved)")

    p = sub.add_parser("simulate", help="run an SNR sweep and write CSV")
    _add_code_args(p)
    p.add_argument("--mod", default="bpsk", choices=[m.value for m in Modulation])
    p.add_argument("--decoder", default="sgrandab", choices=DECODERS)
    snr = p.add_mutually_exclusive_group(required=True)
    snr.add_argument("--snr", help="start:stop:step in dB, stop inclusive")
    snr.add_argument("--snr-list", help="comma separated SNRs in dB")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-queries", default=str(DEFAULT_MAX_QUERIES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ebn0-convention", default="plain", choices=["plain", "threegpp"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default stdout)")
    return parser


def _cmd_gen_code(args, out):
    try:
        if args.kind == "hamming":
            if args.r is None:
                raise UsageError("--kind hamming needs --r")
            code = codes.hamming_code(args.r)
        else:
            if args.n is None or args.k is None:
                raise UsageError(f"--kind {args.kind} needs --n and --k")
            if args.kind == "random":
                code = codes.random_linear_code(args.n, args.k, args.seed)
            elif args.kind == "polar":
                code = codes.polar_code(args.n, args.k, args.design_snr)
            else:
                code = codes.ca_polar_code(args.n, args.k, args.crc, design_snr_db=args.design_snr)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        codes.save_code(code, args.out)
    else:
        codes.save_code(code, out)


def _read_lines(path) -> list[str]:
    try:
        with open(path) as fh:
            return [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _cmd_encode(args, out):
    code = load_selected_code(args)
    messages = list(args.message)
    if args.input:
        messages += _read_lines(args.input)
    if not messages:
        raise UsageError("give --message or --input")
    for msg in messages:
        if len(msg) != code.k or set(msg) - {"0", "1"}:
            raise DataError(f"message {msg!r} is not {code.k} bits")
        c = code.encode(np.array([ch == "1" for ch in msg], dtype=np.uint8))
        out.write("".join(map(str, c.tolist())) + "\n")


def _cmd_decode(args, out):
    code = load_selected_code(args)
    b = parse_budget(args.max_queries)
    mod = Modulation(args.mod)
    try:
        spec = ChannelSpec(args.sigma2, mod) if args.sigma2 is not None else ChannelSpec.from_snr(args.snr, mod)
        decode = make_decoder(args.decoder, code, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for lineno, line in enumerate(_read_lines(args.input), start=1):
        try:
            vals = np.array([float(v) for v in line.split()])
        except ValueError as exc:
            raise DataError(f"{args.input}:{lineno}: non-numeric value") from exc
        if vals.size != code.n:
            raise DataError(f"{args.input}:{lineno}: expected {code.n} values, got {vals.size}")
        y = vals.astype(complex) if mod is Modulation.BPSK else vals[0::2] + 1j * vals[1::2]
        try:
            res = decode(y, spec)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        word = "ERASURE" if res.erased else "".join(map(str, res.codeword.tolist()))
        out.write(f"{word} {res.queries}\n")


def _cmd_simulate(args, out):
    code = load_selected_code(args)
    try:
        config = SweepConfig(
            code=code,
            snrs=parse_snrs(args),
            trials=args.trials,
            modulation=Modulation(args.mod),
            decoder=args.decoder,
            max_queries=parse_budget(args.max_queries),
            seed=args.seed,
            ebn0_convention=args.ebn0_convention,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    records = run_sweep(config)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                write_csv(records, fh)
        except OSError as exc:
            raise DataError(f"cannot write {args.out}: {exc}") from exc
    else:
        write_csv(records, out)


COMMANDS = {
    "gen-code": _cmd_gen_code,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "simulate": _cmd_simulate,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
