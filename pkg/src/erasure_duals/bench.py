"""Timing and error harness for the reduced-dual constructions.

Each test draws a random frame X, its canonical dual and two random duals
Z1, Z2, erases E = {0, ..., k-1} and times

    t1  iterative, canonical dual      t4_z1 / t4_z2  iterative, Z1 / Z2
    t2  Gram solve, canonical dual     t5_z1 / t5_z2  Gram solve, Z1 / Z2
    t3  pseudo-inverse of the reduced frame (baseline)

with the matching duality errors e1..e5 = ||V U^* - I||_2. Only the
construction itself is inside the timed region.
"""
from __future__ import annotations

import csv
import dataclasses
import logging
import statistics
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import ConstructionError, IllConditioned, MrcRetryExhausted, NotAFrame
from .erasure import (
    DENOM_TOL,
    EQUIVALENCE_TOL,
    ErasureSet,
    gram_kernel,
    iterative_kernel,
    mrc_check,
)
from .frames import (
    DUALITY_TOL,
    RANK_TOL,
    canonical_dual,
    columnwise_relative_difference,
    duality_error,
    make_frame,
    pinv_synthesis_dual,
    random_dual,
    random_frame,
)

log = logging.getLogger(__name__)

MRC_RETRIES = 10

COLUMNS = ("t1", "t2", "t3", "t4_z1", "t5_z1", "t4_z2", "t5_z2")
ERROR_COLUMNS = ("e1", "e2", "e3", "e4_z1", "e5_z1", "e4_z2", "e5_z2")
HEADER = (
    "test_id", "N", "r", "k", "seed", "reps", "threads",
    *COLUMNS, *ERROR_COLUMNS, "status",
)


@dataclass(frozen=True)
class BenchConfig:
    N: int
    r: int
    k: int
    seed: int = 0
    repetitions: int = 5
    warmup: int = 1
    field: str = "real"
    spread: float = 1.0
    threads: int = 1
    rank_tol: float = RANK_TOL
    denom_tol: float = DENOM_TOL
    duality_tol: float = DUALITY_TOL
    test_id: str | None = None

    def __post_init__(self):
        if not 1 <= self.r <= self.N:
            raise ValueError(f"need 1 <= r <= N, got r={self.r}, N={self.N}")
        if not 1 <= self.k < self.N:
            raise ValueError(f"need 1 <= k < N, got k={self.k}, N={self.N}")
        if self.repetitions < 1 or self.warmup < 0 or self.threads < 1:
            raise ValueError("repetitions and threads must be >= 1, warmup >= 0")
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        d = dict(d)
        if "reps" in d:
            d["repetitions"] = d.pop("reps")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class BenchRecord:
    config: BenchConfig
    times: dict[str, float | None]
    errors: dict[str, float | None]
    failures: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    attempts: int = 1

    @property
    def status(self) -> str:
        parts = [f"{col}={kind}" for col, kind in self.failures.items()] + self.notes
        return ";".join(parts) if parts else "ok"

    def row(self, test_id: str) -> list[str]:
        c = self.config
        cells = [test_id, c.N, c.r, c.k, c.seed, c.repetitions, c.threads]
        cells += [_cell(self.times[col]) for col in COLUMNS]
        cells += [_cell(self.errors[col]) for col in ERROR_COLUMNS]
        cells.append(self.status)
        return [str(v) for v in cells]


def _cell(value: float | None) -> str:
    return "NA" if value is None else repr(float(value))


def _time(fn: Callable[[], np.ndarray], warmup: int, reps: int):
    for _ in range(warmup):
        fn()
    samples = []
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), out


def _setup(config: BenchConfig):
    """Draw frames until the leading k indices satisfy the MRC."""
    E = ErasureSet(tuple(range(config.k)), config.N)
    for attempt in range(MRC_RETRIES):
        x = random_frame(config.r, config.N, [config.seed, attempt], config.field)
        try:
            frame = make_frame(x, config.rank_tol)
        except NotAFrame:
            continue
        if mrc_check(frame, E, config.rank_tol):
            return frame, E, attempt
        log.debug("seed %s attempt %d: MRC fails, redrawing", config.seed, attempt)
    raise MrcRetryExhausted(
        f"no frame with N={config.N}, r={config.r} satisfied the MRC for k={config.k} "
        f"after {MRC_RETRIES} draws"
    )


def run_test(config: BenchConfig) -> BenchRecord:
    with threadpool_limits(limits=config.threads):
        return _run_test(config)


def _run_test(config: BenchConfig) -> BenchRecord:
    frame, E, attempt = _setup(config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditioned)
        canon = canonical_dual(frame, config.duality_tol)
    z1 = random_dual(canon, [config.seed, attempt, 1], config.spread, config.duality_tol)
    z2 = random_dual(canon, [config.seed, attempt, 2], config.spread, config.duality_tol)

    x = frame.elements
    erased = np.asarray(E.erased, dtype=np.intp)
    keep = np.asarray(E.complement, dtype=np.intp)
    reduced = x[:, keep]
    tol = config.denom_tol

    def iterative(z):
        return lambda: iterative_kernel(x, z, erased, keep, tol)[0]

    def gram(z):
        return lambda: gram_kernel(x, z, erased, keep)[0]

    jobs = {
        "t1": iterative(canon.dual),
        "t2": gram(canon.dual),
        "t3": lambda: pinv_synthesis_dual(reduced),
        "t4_z1": iterative(z1.dual),
        "t5_z1": gram(z1.dual),
        "t4_z2": iterative(z2.dual),
        "t5_z2": gram(z2.dual),
    }
    times: dict[str, float | None] = {}
    errors: dict[str, float | None] = {}
    outputs = {}
    record = BenchRecord(config, times, errors, attempts=attempt + 1)
    for col, ecol in zip(COLUMNS, ERROR_COLUMNS):
        try:
            t, v = _time(jobs[col], config.warmup, config.repetitions)
        except ConstructionError as exc:
            times[col] = errors[ecol] = None
            record.failures[col] = exc.kind
            continue
        times[col] = t
        errors[ecol] = duality_error(frame, v, keep)
        outputs[col] = v

    if "t3" in outputs:
        for col in ("t1", "t2"):
            if col in outputs:
                diff = columnwise_relative_difference(outputs[col], outputs["t3"])
                if diff > EQUIVALENCE_TOL:
                    record.notes.append(f"{col}_vs_pinv={diff:.3e}")
    return record


def ordering_warnings(record: BenchRecord) -> list[str]:
    """Flag runs where t1 or t2 is not faster than the pinv baseline t3."""
    t3 = record.times.get("t3")
    out = []
    for col in ("t1", "t2"):
        t = record.times.get(col)
        if t is not None and t3 is not None and t >= t3:
            out.append(f"{col}={t:.4g}s is not below t3={t3:.4g}s")
    return out


def write_csv(records: Iterable[tuple[str, BenchRecord]], path) -> None:
    """Write the CSV to a path or an open text stream."""
    if hasattr(path, "write"):
        _write_rows(records, path)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(records, fh)


def _write_rows(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(HEADER)
    fh.flush()
    for test_id, rec in records:
        w.writerow(rec.row(test_id))
        fh.flush()


def run_suite(configs: Iterable[BenchConfig], output_path) -> list[BenchRecord]:
    """Run every config, streaming one CSV row each to ``output_path``."""
    configs = list(configs)
    records = []

    def rows():
        for i, config in enumerate(configs, start=1):
            log.info("bench %d/%d: N=%d r=%d k=%d", i, len(configs), config.N, config.r, config.k)
            rec = run_test(config)
            records.append(rec)
            yield config.test_id or str(i), rec

    write_csv(rows(), output_path)
    return records
