"""Transmission pipeline: encode, erase, rebuild a dual, reconstruct."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import BadK, ConstructionError
from .erasure import (
    COND_LIMIT,
    DENOM_TOL,
    ErasureSet,
    Method,
    mrc_check,
    reconstruct,
    reduced_dual,
)
from .frames import RANK_TOL, DualPair, SeedLike, analysis

RECOVERED = "Recovered"
MRC_VIOLATED = "MrcViolated"
CONSTRUCTION_FAILED = "ConstructionFailed"


@dataclass(frozen=True)
class TransmissionReport:
    signal_norm: float
    erased: ErasureSet
    method: Method
    mrc_ok: bool
    status: str
    recon_error_rel: float | None = None
    reason: str | None = None
    message: str | None = None

    @property
    def recovered(self) -> bool:
        return self.status == RECOVERED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "message": self.message,
            "method": self.method.value,
            "erased_indices": self.erased.one_based(),
            "mrc_ok": self.mrc_ok,
            "signal_norm": self.signal_norm,
            "recon_error_rel": self.recon_error_rel,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def transmit(
    pair: DualPair,
    E: ErasureSet,
    h,
    method: Method | str = Method.GRAM,
    *,
    rank_tol: float = RANK_TOL,
    denom_tol: float = DENOM_TOL,
    cond_limit: float = COND_LIMIT,
) -> TransmissionReport:
    """Send ``h`` through the frame, lose the coefficients at E and recover it.

    Failures never raise; they are reported through ``status``.
    """
    method = Method(method)
    frame = pair.frame
    h = np.asarray(h)
    coeffs = analysis(frame, h)
    received = coeffs.copy()
    received[list(E.erased)] = 0
    norm = float(np.linalg.norm(h))

    if not mrc_check(frame, E, rank_tol):
        return TransmissionReport(norm, E, method, False, MRC_VIOLATED)
    try:
        reduced = reduced_dual(
            pair, E, method, denom_tol=denom_tol, cond_limit=cond_limit, check_mrc=False
        )
    except ConstructionError as exc:
        return TransmissionReport(
            norm, E, method, True, CONSTRUCTION_FAILED, reason=exc.kind, message=str(exc)
        )
    estimate = reconstruct(reduced, frame, received)
    err = float(np.linalg.norm(estimate - h))
    rel = err / norm if norm > 0 else err
    return TransmissionReport(norm, E, method, True, RECOVERED, recon_error_rel=rel)


def random_erasure(n: int, k: int, seed: SeedLike) -> ErasureSet:
    """Uniform random k-subset of range(n), ascending."""
    if not 1 <= k < n:
        raise BadK(f"need 1 <= k < N, got k={k}, N={n}")
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(n, size=k, replace=False))
    return ErasureSet(tuple(int(i) for i in picked), n)


def random_signal(r: int, seed: SeedLike, field: str = "real") -> np.ndarray:
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(r)
    if field == "complex":
        h = h + 1j * rng.standard_normal(r)
    return h


def write_jsonl(reports: Iterable[TransmissionReport], fh: TextIO) -> int:
    count = 0
    for report in reports:
        fh.write(report.to_json() + "\n")
        count += 1
    return count
