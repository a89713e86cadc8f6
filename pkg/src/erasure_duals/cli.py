"""Command-line entry point.

Exit codes: 0 success, 1 verification failed, 2 usage, 3 I/O,
4 minimal redundancy condition violated, 5 construction failure.
Payloads go to stdout as JSON (or CSV for ``bench``); diagnostics go to stderr.
Frame indices on the command line and in JSON output are 1-based.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import bench
from .channel import MRC_VIOLATED, RECOVERED, random_erasure, random_signal, transmit
from .erasure import (
    DENOM_TOL,
    ErasureSet,
    equivalence_check,
    mrc_check,
    reduced_dual,
    write_reduced,
)
from .errors import (
    BadErasure,
    ConstructionError,
    FrameError,
    MrcRetryExhausted,
    MrcViolated,
    NotADual,
)
from .frames import (
    COND_LIMIT,
    DUALITY_TOL,
    RANK_TOL,
    canonical_dual,
    columnwise_relative_difference,
    dual_pair,
    duality_error,
    frame_bounds,
    make_frame,
    numerical_rank,
    random_dual,
    random_frame,
)
from .frm import FrmFormatError, parse_entry, read_frm, write_frm

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO, EXIT_MRC, EXIT_CONSTRUCTION = 0, 1, 2, 3, 4, 5
SEED_ENV = "FRAME_ERASURE_SEED"

log = logging.getLogger("erasure_duals")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(None),
                   help=f"RNG seed (falls back to ${SEED_ENV}, then 0)")
    p.add_argument("--tol-rank", type=float, default=d(RANK_TOL))
    p.add_argument("--tol-dual", type=float, default=d(DUALITY_TOL))
    p.add_argument("--tol-denom", type=float, default=d(DENOM_TOL))
    p.add_argument("--cond-limit", type=float, default=d(COND_LIMIT))
    p.add_argument("--field", choices=("real", "complex"), default=d("real"))
    p.add_argument("--threads", type=int, default=d(1))
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasure-duals",
        description="Dual frames compensating for erased frame coefficients.",
    )
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)

    p = sub.add_parser("gen", parents=[common], help="write a random frame (and a dual)")
    p.add_argument("--n", type=int, required=True, help="number of frame elements N")
    p.add_argument("--r", type=int, required=True, help="dimension r")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--dual", choices=("canonical", "random"))
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--dual-out", type=Path, help="default: <out stem>.dual<suffix>")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("info", parents=[common], help="describe an FRM1 frame file")
    p.add_argument("--frame", type=Path, required=True)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("verify", parents=[common], help="check that a dual reconstructs")
    p.add_argument("--frame", type=Path, required=True)
    p.add_argument("--dual", type=Path, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", parents=[common], help="dual of the frame after erasures")
    p.add_argument("--frame", type=Path, required=True)
    p.add_argument("--dual", type=Path, help="default: the canonical dual")
    p.add_argument("--erase", required=True, help='comma-separated 1-based indices, e.g. "1,5"')
    p.add_argument("--method", choices=("iter", "gram", "op", "all"), default="gram")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("transmit", parents=[common], help="simulate erasure and recovery")
    p.add_argument("--frame", type=Path, required=True)
    p.add_argument("--dual", type=Path, help="default: the canonical dual")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--erase", help="comma-separated 1-based indices")
    g.add_argument("--random-erase", type=int, metavar="K", help="K random erasures per trial")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--signal", type=Path)
    g.add_argument("--random-signal", action="store_true")
    p.add_argument("--method", choices=("iter", "gram", "op"), default="gram")
    p.add_argument("--trials", type=int, default=1, help="emit JSON lines when > 1")
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("bench", parents=[common], help="timing/error table as CSV")
    p.add_argument("--config", type=Path, help="JSON object or list of objects")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


# -- helpers --------------------------------------------------------------


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload) + "\n")


def _load_matrix(path: Path) -> np.ndarray:
    try:
        return read_frm(path)
    except (OSError, FrmFormatError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def _save(path: Path, matrix) -> None:
    try:
        write_frm(path, matrix)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _load_frame(args):
    try:
        return make_frame(_load_matrix(args.frame), args.tol_rank)
    except FrameError as exc:
        raise CliError(EXIT_USAGE, f"{args.frame}: {exc}") from None


def _load_pair(args, frame):
    if args.dual is None:
        return canonical_dual(frame, args.tol_dual, args.cond_limit)
    z = _load_matrix(args.dual)
    try:
        pair = dual_pair(frame, z, args.tol_dual)
    except NotADual as exc:
        raise CliError(EXIT_USAGE, f"{args.dual} is not a dual of {args.frame}: {exc}") from None
    except FrameError as exc:
        raise CliError(EXIT_USAGE, f"{args.dual}: {exc}") from None
    canon = canonical_dual(frame, args.tol_dual, args.cond_limit)
    if columnwise_relative_difference(pair.dual, canon.dual) <= 1e-8:
        pair = dual_pair(frame, z, args.tol_dual, is_canonical=True)
    return pair


def _parse_erase(text: str, count: int) -> ErasureSet:
    try:
        idx = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise CliError(EXIT_USAGE, f"--erase expects comma-separated integers, got {text!r}") from None
    try:
        return ErasureSet.from_one_based(idx, count)
    except BadErasure as exc:
        raise CliError(EXIT_USAGE, f"--erase: {exc} (indices are 1-based, N={count})") from None


def _mrc_message(E: ErasureSet) -> str:
    return (
        f"erasure set {E.one_based()} violates the minimal redundancy condition: "
        "the surviving frame elements do not span the space"
    )


def _read_signal(path: Path, r: int) -> np.ndarray:
    try:
        tokens = path.read_text().split()
        values = [parse_entry(t, True) for t in tokens]
    except (OSError, FrmFormatError) as exc:
        raise CliError(EXIT_IO, f"cannot read signal {path}: {exc}") from None
    if len(values) != r:
        raise CliError(EXIT_IO, f"signal {path} has {len(values)} entries, expected {r}")
    h = np.array(values, dtype=complex)
    if not np.all(np.isfinite(h)):
        raise CliError(EXIT_IO, f"signal {path} has non-finite entries")
    return h.real.copy() if not np.any(h.imag) else h


# -- subcommands ----------------------------------------------------------


def cmd_gen(args) -> int:
    if args.r < 1 or args.n < args.r:
        raise CliError(EXIT_USAGE, f"need N >= r >= 1, got --n {args.n} --r {args.r}")
    if args.spread < 0:
        raise CliError(EXIT_USAGE, "--spread must be nonnegative")
    x = random_frame(args.r, args.n, args.seed, args.field)
    frame = make_frame(x, args.tol_rank)
    _save(args.out, frame.elements)
    out = {"frame": str(args.out), "r": frame.dim, "N": frame.count, "field": frame.field}
    if args.dual:
        pair = canonical_dual(frame, args.tol_dual, args.cond_limit)
        if args.dual == "random":
            pair = random_dual(pair, [args.seed, 1], args.spread, args.tol_dual)
        dual_out = args.dual_out or args.out.with_name(
            f"{args.out.stem}.dual{args.out.suffix or '.frm'}"
        )
        _save(dual_out, pair.dual)
        out.update(dual=str(dual_out), dual_kind=args.dual, duality_error=pair.duality_residual)
    _emit(out)
    return EXIT_OK


def cmd_info(args) -> int:
    m = _load_matrix(args.frame)
    r, n = m.shape
    info = {"field": "complex" if m.dtype.kind == "c" else "real", "r": r, "N": n,
            "rank": numerical_rank(m, args.tol_rank), "is_frame": False}
    try:
        frame = make_frame(m, args.tol_rank)
    except FrameError as exc:
        info["reason"] = str(exc)
    else:
        b = frame_bounds(frame)
        info.update(is_frame=True, lower_bound=b.lower, upper_bound=b.upper)
    _emit(info)
    return EXIT_OK


def cmd_verify(args) -> int:
    frame = _load_frame(args)
    z = _load_matrix(args.dual)
    if z.shape != frame.elements.shape:
        raise CliError(EXIT_USAGE, f"dual shape {z.shape} != frame shape {frame.elements.shape}")
    err = duality_error(frame, z)
    ok = err <= args.tol_dual
    _emit({"duality_error": err, "tol": args.tol_dual, "ok": ok})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_reduce(args) -> int:
    frame = _load_frame(args)
    E = _parse_erase(args.erase, frame.count)
    pair = _load_pair(args, frame)
    if not mrc_check(frame, E, args.tol_rank):
        raise CliError(EXIT_MRC, _mrc_message(E))

    if args.method == "all":
        report = equivalence_check(
            pair, E, denom_tol=args.tol_denom, cond_limit=args.cond_limit, check_mrc=False
        )
        payload = report.to_dict()
        payload["input_dual_canonical"] = pair.is_canonical
        for anomaly in report.anomalies:
            log.warning("anomaly: %s", anomaly)
        if args.out:
            try:
                args.out.write_text(json.dumps(payload, indent=2) + "\n")
            except OSError as exc:
                raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from None
        _emit(payload)
        if not report.results:
            for m, msg in report.messages.items():
                log.error("%s: %s", m.value, msg)
            return EXIT_CONSTRUCTION
        return EXIT_OK

    try:
        reduced = reduced_dual(
            pair, E, args.method, denom_tol=args.tol_denom,
            cond_limit=args.cond_limit, check_mrc=False,
        )
    except ConstructionError as exc:
        raise CliError(EXIT_CONSTRUCTION, f"{exc.kind}: {exc}") from None
    payload = reduced.sidecar()
    if args.out:
        try:
            _, sidecar = write_reduced(reduced, args.out)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from None
        payload.update(out=str(args.out), sidecar=str(sidecar))
    _emit(payload)
    return EXIT_OK


def cmd_transmit(args) -> int:
    frame = _load_frame(args)
    if args.trials < 1:
        raise CliError(EXIT_USAGE, "--trials must be >= 1")
    fixed_E = _parse_erase(args.erase, frame.count) if args.erase else None
    if args.random_erase is not None and not 1 <= args.random_erase < frame.count:
        raise CliError(EXIT_USAGE, f"--random-erase needs 1 <= K < N={frame.count}")
    fixed_h = _read_signal(args.signal, frame.dim) if args.signal else None
    pair = _load_pair(args, frame)

    worst = EXIT_OK
    for trial in range(args.trials):
        E = fixed_E or random_erasure(frame.count, args.random_erase, [args.seed, trial, 0])
        h = fixed_h if fixed_h is not None else random_signal(
            frame.dim, [args.seed, trial, 1], args.field
        )
        report = transmit(
            pair, E, h, args.method, rank_tol=args.tol_rank,
            denom_tol=args.tol_denom, cond_limit=args.cond_limit,
        )
        sys.stdout.write(report.to_json() + "\n")
        if report.status == RECOVERED:
            continue
        code = EXIT_MRC if report.status == MRC_VIOLATED else EXIT_CONSTRUCTION
        log.error("trial %d: %s %s", trial, report.status, report.message or "")
        worst = max(worst, code)
    return worst


def _bench_configs(args) -> list[bench.BenchConfig]:
    base = {"seed": args.seed, "field": args.field, "threads": args.threads,
            "rank_tol": args.tol_rank, "denom_tol": args.tol_denom, "duality_tol": args.tol_dual}
    if args.config:
        try:
            raw = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_IO, f"cannot read config {args.config}: {exc}") from None
        items = raw if isinstance(raw, list) else [raw]
    else:
        if None in (args.n, args.r, args.k):
            raise CliError(EXIT_USAGE, "bench needs --config or all of --n, --r, --k")
        items = [{"N": args.n, "r": args.r, "k": args.k, "repetitions": args.reps,
                  "warmup": args.warmup, "spread": args.spread}]
    try:
        return [bench.BenchConfig.from_dict({**base, **item}) for item in items]
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"bad bench config: {exc}") from None


def cmd_bench(args) -> int:
    configs = _bench_configs(args)
    out = args.out or sys.stdout
    try:
        records = bench.run_suite(configs, out)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {out}: {exc}") from None
    except FrameError as exc:
        code = EXIT_MRC if isinstance(exc, MrcRetryExhausted) else EXIT_USAGE
        raise CliError(code, str(exc)) from None
    for rec in records:
        for msg in bench.ordering_warnings(rec):
            log.warning("N=%d r=%d k=%d: %s", rec.config.N, rec.config.r, rec.config.k, msg)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            parser.error(f"${SEED_ENV} must be an integer, got {env!r}")
    for name in ("tol_rank", "tol_dual", "tol_denom", "cond_limit"):
        if not getattr(args, name) >= 0:
            parser.error(f"--{name.replace('_', '-')} must be nonnegative")
    if args.threads < 1:
        parser.error("--threads must be >= 1")

    warnings.simplefilter("default")
    logging.captureWarnings(True)
    try:
        with threadpool_limits(limits=args.threads):
            return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except MrcViolated as exc:
        log.error("%s", exc)
        return EXIT_MRC


if __name__ == "__main__":
    sys.exit(main())
