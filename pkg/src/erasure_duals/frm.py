"""FRM1 text format for dense frames.

::

    FRM1 <real|complex> <r> <N>
    <r lines of N whitespace-separated entries>

Complex entries are written ``a+bi`` without spaces. Values are printed with
17 significant digits so that reading them back is bit-exact.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

MAGIC = "FRM1"

_FLOAT = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^({_FLOAT})([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$")
_REAL = re.compile(rf"^{_FLOAT}$")


class FrmFormatError(ValueError):
    pass


def format_real(value: float) -> str:
    return f"{value:.17g}"


def format_complex(value: complex) -> str:
    return f"{value.real:.17g}{value.imag:+.17g}i"


def parse_entry(token: str, is_complex: bool):
    if is_complex:
        m = _COMPLEX.match(token)
        if m:
            return complex(float(m.group(1)), float(m.group(2)))
    if _REAL.match(token):
        return float(token)
    raise FrmFormatError(f"malformed entry {token!r}")


def dumps(matrix) -> str:
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise FrmFormatError(f"expected a 2-D matrix, got shape {a.shape}")
    is_complex = a.dtype.kind == "c"
    fmt = format_complex if is_complex else format_real
    lines = [f"{MAGIC} {'complex' if is_complex else 'real'} {a.shape[0]} {a.shape[1]}"]
    for row in a:
        lines.append(" ".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def loads(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FrmFormatError("empty FRM1 file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != MAGIC:
        raise FrmFormatError(f"bad header {lines[0]!r}")
    field = header[1]
    if field not in ("real", "complex"):
        raise FrmFormatError(f"unknown field {field!r}")
    try:
        r, n = int(header[2]), int(header[3])
    except ValueError:
        raise FrmFormatError(f"bad dimensions in header {lines[0]!r}") from None
    if r < 1 or n < 1:
        raise FrmFormatError(f"dimensions must be positive, got {r}x{n}")
    rows = lines[1:]
    if len(rows) != r:
        raise FrmFormatError(f"expected {r} rows, found {len(rows)}")
    is_complex = field == "complex"
    out = np.empty((r, n), dtype=np.complex128 if is_complex else np.float64)
    for i, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != n:
            raise FrmFormatError(f"row {i + 1} has {len(tokens)} entries, expected {n}")
        out[i] = [parse_entry(t, is_complex) for t in tokens]
    if not np.all(np.isfinite(out)):
        raise FrmFormatError("entries must be finite")
    return out


def write_frm(path, matrix) -> None:
    Path(path).write_text(dumps(matrix))


def read_frm(path) -> np.ndarray:
    return loads(Path(path).read_text())
