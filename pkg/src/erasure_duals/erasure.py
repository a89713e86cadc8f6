"""Dual frames of a reduced frame after erasing coefficients.

Given a frame X, a dual Z of X and an erasure set E whose complement still
spans the space, three constructions produce a dual (v_n) of the surviving
family (x_n), n not in E:

* ``gram``: solve one k x k system with matrix A = [<z_j, x_i>] - I over the
  erased indices and set v_n = z_n - sum_i alpha_ni z_i.
* ``op``: invert T = I - sum_{i in E} z_i x_i^H and set v_n = T^{-1} z_n.
* ``iter``: remove the erased indices one at a time with a rank-one update.

With the canonical dual as input all three return the canonical dual of the
reduced frame. For other duals each may fail; a successful iterative run
guarantees the other two succeed and all three coincide.

Indices are 0-based here. The order of ``ErasureSet.erased`` fixes the
traversal E_1 c E_2 c ... c E_k of the iterative method.
"""
from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy import linalg
from scipy.linalg import get_blas_funcs, get_lapack_funcs

from .errors import (
    BadErasure,
    ConditionExceeded,
    ConstructionError,
    DenominatorVanishes,
    DimensionMismatch,
    MrcViolated,
    SingularGram,
    SingularOperator,
)
from .frames import (
    COND_LIMIT,
    RANK_TOL,
    DualPair,
    Frame,
    columnwise_relative_difference,
    duality_error,
    numerical_rank,
)
from .frm import write_frm

DENOM_TOL = 1e-12
# a solve is declared singular below this reciprocal condition estimate ...
SINGULAR_RCOND = 1e-12
# ... or when its relative residual exceeds this
SINGULAR_RESIDUAL = 1e-6
EQUIVALENCE_TOL = 1e-8


class Method(str, enum.Enum):
    ITERATIVE = "iter"
    GRAM = "gram"
    OPERATOR = "op"


@dataclass(frozen=True)
class ErasureSet:
    erased: tuple[int, ...]
    count: int

    def __post_init__(self):
        erased = tuple(int(i) for i in self.erased)
        object.__setattr__(self, "erased", erased)
        if not erased:
            raise BadErasure("erasure set must be nonempty")
        if len(set(erased)) != len(erased):
            raise BadErasure(f"erased indices must be distinct: {erased}")
        if len(erased) >= self.count:
            raise BadErasure(f"cannot erase {len(erased)} of {self.count} elements")
        bad = [i for i in erased if not 0 <= i < self.count]
        if bad:
            raise BadErasure(f"indices {bad} outside 0..{self.count - 1}")

    @property
    def k(self) -> int:
        return len(self.erased)

    @property
    def complement(self) -> tuple[int, ...]:
        gone = set(self.erased)
        return tuple(i for i in range(self.count) if i not in gone)

    @classmethod
    def from_one_based(cls, indices, count: int) -> "ErasureSet":
        return cls(tuple(int(i) - 1 for i in indices), count)

    def one_based(self) -> list[int]:
        return [i + 1 for i in self.erased]


def _check_erasure(frame: Frame, E: ErasureSet) -> None:
    if E.count != frame.count:
        raise DimensionMismatch(
            f"erasure set is over {E.count} indices, frame has {frame.count} elements"
        )


def mrc_check(frame: Frame, E: ErasureSet, rank_tol: float = RANK_TOL) -> bool:
    """True iff the surviving elements still span the space."""
    _check_erasure(frame, E)
    return numerical_rank(frame.subframe(E.complement), rank_tol) == frame.dim


@dataclass(frozen=True, eq=False)
class ErasureGram:
    """A = [<z_j, x_i>]_{i,j in E} - I and its condition estimate."""

    matrix: np.ndarray
    condition_estimate: float


@dataclass(frozen=True, eq=False)
class ReducedDual:
    indices: tuple[int, ...]
    vectors: np.ndarray
    method: Method
    erased: tuple[int, ...]
    duality_residual: float
    steps: tuple[complex, ...] | None = None
    condition_estimate: float | None = None
    warnings: tuple[str, ...] = field(default=())

    def sidecar(self) -> dict:
        steps = None
        if self.steps is not None:
            steps = [_json_scalar(d) for d in self.steps]
        return {
            "method": self.method.value,
            "erased_indices": [i + 1 for i in self.erased],
            "duality_residual": self.duality_residual,
            "steps": steps,
        }


def _json_scalar(value):
    value = complex(value)
    if value.imag == 0:
        return value.real
    return [value.real, value.imag]


def write_reduced(reduced: ReducedDual, path) -> tuple[Path, Path]:
    """Write the vectors as FRM1 and the metadata to ``<path>.json``."""
    path = Path(path)
    write_frm(path, reduced.vectors)
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(reduced.sidecar(), indent=2) + "\n")
    return path, sidecar


# -- numerical kernels ---------------------------------------------------
#
# The kernels take raw matrices and do only the construction itself, so the
# benchmark can time them without MRC checks or error evaluation.


def _lu_or_singular(a: np.ndarray, error: type[ConstructionError], what: str):
    anorm = float(np.abs(a).sum(axis=0).max()) if a.size else 0.0
    if anorm == 0.0 or not np.all(np.isfinite(a)):
        raise error(f"{what} is numerically singular (zero or non-finite matrix)")
    with warnings.catch_warnings():
        # exactly singular pivots are handled through rcond below
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(a, check_finite=False)
    (gecon,) = get_lapack_funcs(("gecon",), (lu,))
    rcond, _ = gecon(lu, anorm, norm="1")
    if not rcond > SINGULAR_RCOND:
        raise error(f"{what} is numerically singular (rcond estimate {rcond:.3e})")
    return (lu, piv), 1.0 / rcond


def _solve_checked(a, factor, rhs, error, what):
    sol = linalg.lu_solve(factor, rhs, check_finite=False)
    if not np.all(np.isfinite(sol)):
        raise error(f"{what} solve produced non-finite values")
    scale = np.linalg.norm(a, 1) * np.linalg.norm(sol, 1) + np.linalg.norm(rhs, 1)
    resid = np.linalg.norm(a @ sol - rhs, 1)
    if scale > 0 and resid > SINGULAR_RESIDUAL * scale:
        raise error(f"{what} solve residual {resid / scale:.3e} too large")
    return sol


def erasure_gram_matrix(x: np.ndarray, z: np.ndarray, erased) -> np.ndarray:
    xe = x[:, erased]
    a = xe.conj().T @ z[:, erased]
    a[np.diag_indices_from(a)] -= 1.0
    return a


def gram_kernel(x, z, erased, keep):
    """Return (V, condition estimate) for the Gram-solve construction."""
    a = erasure_gram_matrix(x, z, erased)
    factor, cond = _lu_or_singular(a, SingularGram, "A_{X,Z,E}")
    # rhs[i, n] = <z_n, x_{E[i]}>, all surviving n at once
    rhs = x[:, erased].conj().T @ z[:, keep]
    alpha = _solve_checked(a, factor, rhs, SingularGram, "A_{X,Z,E}")
    return z[:, keep] - z[:, erased] @ alpha, cond


def operator_kernel(x, z, erased, keep):
    """Return (V, condition estimate) for the operator-inverse construction."""
    t = -(z[:, erased] @ x[:, erased].conj().T)
    t[np.diag_indices_from(t)] += 1.0
    factor, cond = _lu_or_singular(t, SingularOperator, "I - sum z_i x_i^H")
    v = _solve_checked(t, factor, z[:, keep], SingularOperator, "I - sum z_i x_i^H")
    return v, cond


def iterate_kernel(x, z, erased, denom_tol: float = DENOM_TOL) -> Iterator[tuple[int, complex, np.ndarray]]:
    """Run the iterative removal, yielding ``(j, denominator, V)`` after step j.

    ``V`` is the live r x N work buffer: its columns outside E_j hold the
    current family v_n^j, the other columns are stale. Copy it if it must
    outlive the next step.
    """
    dtype = np.result_type(x.dtype, z.dtype)
    v = np.array(z, dtype=dtype, order="F", copy=True)
    (ger,) = get_blas_funcs(("geru" if dtype.kind == "c" else "ger",), (v,))
    for j, e in enumerate(erased, start=1):
        ip = v.T @ x[:, e].conj()  # ip[n] = <v_n, x_e>
        denom = 1.0 - ip[e]
        if not abs(denom) > denom_tol:
            raise DenominatorVanishes(j, complex(denom) if dtype.kind == "c" else float(denom))
        pivot = v[:, e].copy()
        # v_n <- v_n + (<v_n, x_e> / denom) v_e, applied to every column;
        # columns already erased are never read again
        v = ger(1.0, pivot, ip / denom, a=v, overwrite_a=True)
        yield j, denom, v


def iterative_kernel(x, z, erased, keep, denom_tol: float = DENOM_TOL):
    """Return (V, denominators) for the iterative construction."""
    denoms = []
    v = z
    for _, d, v in iterate_kernel(x, z, erased, denom_tol):
        denoms.append(d.item())
    return v[:, keep], denoms


# -- public constructions -------------------------------------------------


def _prepare(pair: DualPair, E: ErasureSet, check_mrc: bool, rank_tol: float):
    _check_erasure(pair.frame, E)
    if check_mrc and not mrc_check(pair.frame, E, rank_tol):
        raise MrcViolated(
            f"erasing {E.one_based()} leaves elements that do not span the space"
        )
    return (
        pair.frame.elements,
        pair.dual,
        np.asarray(E.erased, dtype=np.intp),
        np.asarray(E.complement, dtype=np.intp),
    )


def _finish(pair, E, v, method, steps=None, cond=None, cond_limit=None) -> ReducedDual:
    notes = []
    if cond is not None and cond_limit is not None and cond > cond_limit:
        msg = f"{method.value}: condition estimate {cond:.3e} exceeds {cond_limit:.1e}"
        warnings.warn(msg, ConditionExceeded, stacklevel=3)
        notes.append(msg)
    v = np.array(v, order="F", copy=True)
    v.setflags(write=False)
    return ReducedDual(
        indices=E.complement,
        vectors=v,
        method=method,
        erased=E.erased,
        duality_residual=duality_error(pair.frame, v, E.complement),
        steps=None if steps is None else tuple(steps),
        condition_estimate=cond,
        warnings=tuple(notes),
    )


def erasure_gram(pair: DualPair, E: ErasureSet) -> ErasureGram:
    _check_erasure(pair.frame, E)
    a = erasure_gram_matrix(pair.frame.elements, pair.dual, list(E.erased))
    s = linalg.svdvals(a)
    cond = np.inf if s[-1] == 0 else float(s[0] / s[-1])
    return ErasureGram(a, cond)


def reduced_dual_gram(
    pair: DualPair,
    E: ErasureSet,
    cond_limit: float = COND_LIMIT,
    *,
    check_mrc: bool = True,
    rank_tol: float = RANK_TOL,
) -> ReducedDual:
    x, z, erased, keep = _prepare(pair, E, check_mrc, rank_tol)
    v, cond = gram_kernel(x, z, erased, keep)
    return _finish(pair, E, v, Method.GRAM, cond=cond, cond_limit=cond_limit)


def reduced_dual_operator(
    pair: DualPair,
    E: ErasureSet,
    cond_limit: float = COND_LIMIT,
    *,
    check_mrc: bool = True,
    rank_tol: float = RANK_TOL,
) -> ReducedDual:
    x, z, erased, keep = _prepare(pair, E, check_mrc, rank_tol)
    v, cond = operator_kernel(x, z, erased, keep)
    return _finish(pair, E, v, Method.OPERATOR, cond=cond, cond_limit=cond_limit)


def reduced_dual_iterative(
    pair: DualPair,
    E: ErasureSet,
    denom_tol: float = DENOM_TOL,
    *,
    check_mrc: bool = True,
    rank_tol: float = RANK_TOL,
) -> ReducedDual:
    x, z, erased, keep = _prepare(pair, E, check_mrc, rank_tol)
    v, denoms = iterative_kernel(x, z, erased, keep, denom_tol)
    return _finish(pair, E, v, Method.ITERATIVE, steps=denoms)


def iterative_families(
    pair: DualPair, E: ErasureSet, denom_tol: float = DENOM_TOL
) -> Iterator[tuple[int, tuple[int, ...], np.ndarray]]:
    """Yield ``(j, surviving indices, V^j)`` for every intermediate step.

    V^j is a copy holding the dual of the frame with E_j = E[:j] erased.
    Raises DenominatorVanishes at the first ill-defined step.
    """
    _check_erasure(pair.frame, E)
    x = pair.frame.elements
    alive = np.ones(E.count, dtype=bool)
    for j, _, v in iterate_kernel(x, pair.dual, list(E.erased), denom_tol):
        alive[E.erased[j - 1]] = False
        idx = np.flatnonzero(alive)
        yield j, tuple(int(i) for i in idx), v[:, idx].copy()


def reduced_dual(
    pair: DualPair,
    E: ErasureSet,
    method: Method | str,
    *,
    denom_tol: float = DENOM_TOL,
    cond_limit: float = COND_LIMIT,
    check_mrc: bool = True,
    rank_tol: float = RANK_TOL,
) -> ReducedDual:
    method = Method(method)
    if method is Method.ITERATIVE:
        return reduced_dual_iterative(pair, E, denom_tol, check_mrc=check_mrc, rank_tol=rank_tol)
    if method is Method.GRAM:
        return reduced_dual_gram(pair, E, cond_limit, check_mrc=check_mrc, rank_tol=rank_tol)
    return reduced_dual_operator(pair, E, cond_limit, check_mrc=check_mrc, rank_tol=rank_tol)


@dataclass
class EquivalenceReport:
    erased: tuple[int, ...]
    tol: float
    results: dict[Method, ReducedDual]
    failures: dict[Method, str]
    messages: dict[Method, str]
    differences: dict[str, float]
    all_equal: bool
    anomalies: list[str]

    def to_dict(self) -> dict:
        return {
            "erased_indices": [i + 1 for i in self.erased],
            "tol": self.tol,
            "succeeded": [m.value for m in Method if m in self.results],
            "failed": {m.value: kind for m, kind in self.failures.items()},
            "messages": {m.value: msg for m, msg in self.messages.items()},
            "duality_residuals": {
                m.value: rd.duality_residual for m, rd in self.results.items()
            },
            "max_relative_differences": self.differences,
            "all_equal": self.all_equal,
            "anomalies": self.anomalies,
        }


def equivalence_check(
    pair: DualPair,
    E: ErasureSet,
    tol: float = EQUIVALENCE_TOL,
    *,
    denom_tol: float = DENOM_TOL,
    cond_limit: float = COND_LIMIT,
    check_mrc: bool = True,
    rank_tol: float = RANK_TOL,
) -> EquivalenceReport:
    """Run all three constructions and compare whatever succeeded.

    Construction failures are recorded, never raised. An iterative success
    accompanied by a Gram or operator failure is reported as an anomaly.
    """
    if check_mrc and not mrc_check(pair.frame, E, rank_tol):
        raise MrcViolated(
            f"erasing {E.one_based()} leaves elements that do not span the space"
        )
    results: dict[Method, ReducedDual] = {}
    failures: dict[Method, str] = {}
    messages: dict[Method, str] = {}
    for method in Method:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConditionExceeded)
                results[method] = reduced_dual(
                    pair, E, method, denom_tol=denom_tol, cond_limit=cond_limit, check_mrc=False
                )
        except ConstructionError as exc:
            failures[method] = exc.kind
            messages[method] = str(exc)

    differences = {}
    for a, b in combinations([m for m in Method if m in results], 2):
        differences[f"{a.value}/{b.value}"] = columnwise_relative_difference(
            results[a].vectors, results[b].vectors
        )
    all_equal = bool(results) and all(d <= tol for d in differences.values())

    anomalies = []
    if Method.ITERATIVE in results:
        for m in (Method.GRAM, Method.OPERATOR):
            if m in failures:
                anomalies.append(f"iterative succeeded but {m.value} failed ({failures[m]})")
    return EquivalenceReport(
        E.erased, tol, results, failures, messages, differences, all_equal, anomalies
    )


def reconstruct(reduced: ReducedDual, frame: Frame, coeffs) -> np.ndarray:
    """sum over surviving n of coeffs[n] v_n; erased entries of coeffs are ignored."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (frame.count,):
        raise DimensionMismatch(f"coeffs must have shape ({frame.count},), got {coeffs.shape}")
    if reduced.vectors.shape != (frame.dim, len(reduced.indices)):
        raise DimensionMismatch("reduced dual does not match the frame dimensions")
    return reduced.vectors @ coeffs[list(reduced.indices)]
