"""Dense finite frames: analysis/synthesis/frame operators and dual frames.

A frame for an r-dimensional space is stored as an r x N matrix whose column
n is the frame element x_n. Inner products are conjugate-linear in the second
slot, <u, v> = sum_i u_i conj(v_i) = v^H u, so the analysis operator is the
matrix X^H and the synthesis operator is X.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import linalg
from scipy.linalg import get_lapack_funcs

from .errors import (
    BadShape,
    DimensionMismatch,
    IllConditioned,
    NotADual,
    NotAFrame,
)

RANK_TOL = 1e-10
DUALITY_TOL = 1e-9
COND_LIMIT = 1e12

SeedLike = Union[int, Sequence[int]]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, order="F", copy=True)
    a.setflags(write=False)
    return a


def _as_matrix(matrix) -> np.ndarray:
    a = np.asarray(matrix)
    if a.dtype.kind not in "biufc":
        raise BadShape(f"matrix must be numeric, got dtype {a.dtype}")
    if a.dtype.kind == "c":
        return a.astype(np.complex128, copy=False)
    return a.astype(np.float64, copy=False)


def numerical_rank(matrix: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    """Count singular values above ``rank_tol`` times the largest one."""
    if matrix.size == 0:
        return 0
    s = linalg.svdvals(matrix, check_finite=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


@dataclass(frozen=True, eq=False)
class Frame:
    """r x N matrix of frame elements (column n is x_n), read-only."""

    elements: np.ndarray

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def count(self) -> int:
        return self.elements.shape[1]

    @property
    def is_complex(self) -> bool:
        return self.elements.dtype.kind == "c"

    @property
    def field(self) -> str:
        return "complex" if self.is_complex else "real"

    def subframe(self, indices) -> np.ndarray:
        return self.elements[:, np.asarray(indices, dtype=np.intp)]


def make_frame(matrix, rank_tol: float = RANK_TOL) -> Frame:
    a = _as_matrix(matrix)
    if a.ndim != 2 or a.size == 0:
        raise BadShape(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    r, n = a.shape
    if n < r:
        raise BadShape(f"a frame needs N >= r, got r={r}, N={n}")
    if not np.all(np.isfinite(a)):
        raise BadShape("frame entries must be finite")
    if rank_tol < 0:
        raise ValueError("rank_tol must be nonnegative")
    rank = numerical_rank(a, rank_tol)
    if rank != r:
        raise NotAFrame(f"numerical rank {rank} < dimension {r} (rank_tol={rank_tol:g})")
    return Frame(_frozen(a))


def _check_vector(v, length: int, name: str) -> np.ndarray:
    v = np.asarray(v)
    if v.shape != (length,):
        raise DimensionMismatch(f"{name} must have shape ({length},), got {v.shape}")
    return v


def analysis(frame: Frame, h) -> np.ndarray:
    """Coefficients (<h, x_n>)_n."""
    h = _check_vector(h, frame.dim, "h")
    return frame.elements.conj().T @ h


def synthesis(frame: Frame, c) -> np.ndarray:
    """sum_n c[n] x_n."""
    c = _check_vector(c, frame.count, "c")
    return frame.elements @ c


def frame_operator(frame: Frame) -> np.ndarray:
    x = frame.elements
    return x @ x.conj().T


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float


def frame_bounds(frame: Frame) -> FrameBounds:
    eig = linalg.eigvalsh(frame_operator(frame), check_finite=False)
    return FrameBounds(lower=float(eig[0]), upper=float(eig[-1]))


def duality_error(frame: Frame, vectors, indices=None) -> float:
    """Spectral norm of V^* U - I.

    ``U`` is the analysis matrix of the (sub)frame at ``indices`` (all
    elements when omitted) and ``V`` the analysis matrix of the candidate
    dual, given as the r x M matrix ``vectors``. Equivalent to
    ``||vectors @ X_sub^H - I||_2``.
    """
    v = np.asarray(vectors)
    sub = frame.elements if indices is None else frame.subframe(indices)
    if v.ndim != 2 or v.shape != sub.shape:
        raise DimensionMismatch(
            f"dual has shape {v.shape}, (sub)frame has shape {sub.shape}"
        )
    residual = v @ sub.conj().T
    residual[np.diag_indices_from(residual)] -= 1.0
    return float(np.linalg.norm(residual, 2))


@dataclass(frozen=True, eq=False)
class DualPair:
    """A frame X together with a verified dual Z (both r x N)."""

    frame: Frame
    dual: np.ndarray
    is_canonical: bool
    duality_residual: float
    condition_estimate: float | None = field(default=None)


def dual_pair(
    frame: Frame, dual, duality_tol: float = DUALITY_TOL, is_canonical: bool = False
) -> DualPair:
    """Wrap a user-supplied dual after checking the reconstruction identity."""
    z = _as_matrix(dual)
    if z.shape != frame.elements.shape:
        raise DimensionMismatch(
            f"dual has shape {z.shape}, frame has shape {frame.elements.shape}"
        )
    if not np.all(np.isfinite(z)):
        raise BadShape("dual entries must be finite")
    residual = duality_error(frame, z)
    if residual > duality_tol:
        raise NotADual(f"||Z X^H - I||_2 = {residual:.3e} exceeds {duality_tol:.1e}")
    return DualPair(frame, _frozen(z), is_canonical, residual)


def _pd_condition(chol: np.ndarray, s: np.ndarray) -> float:
    (pocon,) = get_lapack_funcs(("pocon",), (chol,))
    anorm = float(np.abs(s).sum(axis=0).max())
    rcond, _ = pocon(chol, anorm, uplo="L")
    return np.inf if rcond == 0 else 1.0 / rcond


def canonical_dual(
    frame: Frame, duality_tol: float = DUALITY_TOL, cond_limit: float = COND_LIMIT
) -> DualPair:
    """Y = S^{-1} X by a Cholesky solve of S Y = X."""
    x = frame.elements
    s = frame_operator(frame)
    chol, lower = linalg.cho_factor(s, lower=True, check_finite=False)
    cond = _pd_condition(chol, s)
    if cond > cond_limit:
        warnings.warn(
            f"frame operator condition estimate {cond:.3e} exceeds {cond_limit:.1e}",
            IllConditioned,
            stacklevel=2,
        )
    y = linalg.cho_solve((chol, lower), x, check_finite=False)
    residual = duality_error(frame, y)
    if residual > duality_tol:
        warnings.warn(
            f"canonical dual residual {residual:.3e} exceeds {duality_tol:.1e}",
            IllConditioned,
            stacklevel=2,
        )
    return DualPair(frame, _frozen(y), True, residual, cond)


def pinv_synthesis_dual(elements: np.ndarray) -> np.ndarray:
    """Canonical dual as the adjoint of the SVD pseudo-inverse of X."""
    return np.linalg.pinv(elements).conj().T


def pinv_dual(frame: Frame) -> DualPair:
    y = pinv_synthesis_dual(frame.elements)
    return DualPair(frame, _frozen(y), True, duality_error(frame, y))


def random_dual(
    pair: DualPair,
    seed: SeedLike,
    spread: float = 1.0,
    duality_tol: float = DUALITY_TOL,
) -> DualPair:
    """Non-canonical dual Z = Y + W (I - P).

    P = X^H S^{-1} X projects onto the range of the analysis operator, so
    W (I - P) X^H = 0 and Z stays a dual for any W. The entries of W are
    standard normal times ``spread`` times the RMS entry of the canonical
    dual Y, which keeps Z on the same scale as Y.
    """
    if not pair.is_canonical:
        raise ValueError("random_dual needs the canonical dual pair as input")
    if spread < 0:
        raise ValueError("spread must be nonnegative")
    frame, y = pair.frame, pair.dual
    if frame.count == frame.dim or spread == 0:
        return DualPair(frame, y, False, pair.duality_residual)
    rng = np.random.default_rng(seed)
    scale = spread * float(np.sqrt(np.mean(np.abs(y) ** 2)))
    w = rng.standard_normal(y.shape)
    if frame.is_complex:
        w = (w + 1j * rng.standard_normal(y.shape)) / np.sqrt(2.0)
    w *= scale
    # W (I - P) = W - (W X^H) Y avoids forming the N x N projection
    z = y + w - (w @ frame.elements.conj().T) @ y
    return dual_pair(frame, z, duality_tol=duality_tol, is_canonical=False)


def random_frame(r: int, n: int, seed: SeedLike, field: str = "real") -> np.ndarray:
    """r x N matrix of standard normal entries (unit-variance complex if requested)."""
    if field not in ("real", "complex"):
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((r, n))
    if field == "complex":
        a = (a + 1j * rng.standard_normal((r, n))) / np.sqrt(2.0)
    return a


def columnwise_relative_difference(a: np.ndarray, b: np.ndarray) -> float:
    """max_n ||a_n - b_n|| / max(||a_n||, ||b_n||); 0 for two zero columns."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if a.shape[1] == 0:
        return 0.0
    diff = np.linalg.norm(a - b, axis=0)
    scale = np.maximum(np.linalg.norm(a, axis=0), np.linalg.norm(b, axis=0))
    rel = np.divide(diff, scale, out=np.zeros_like(diff), where=scale > 0)
    return float(rel.max())
