"""Plain-text matrix format.

The first line holds ``rows cols``; each following line holds one row of
whitespace-separated decimal floats.  Values are written with ``repr`` so that
a write/read round trip is bit-exact.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import DictselError


class MatrixFormatError(DictselError, ValueError):
    pass


def format_matrix(A) -> str:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise MatrixFormatError(f"expected a 2-D array, got ndim={A.ndim}")
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for row in A.tolist():
        lines.append(" ".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(path: str | os.PathLike, A) -> None:
    Path(path).write_text(format_matrix(A))


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFormatError(f"bad header {lines[0]!r}; expected 'rows cols'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError as exc:
        raise MatrixFormatError(f"bad header {lines[0]!r}") from exc
    if rows < 0 or cols < 0:
        raise MatrixFormatError("negative dimensions in header")
    body = lines[1:]
    if rows == 0 or cols == 0:
        if body:
            raise MatrixFormatError("data rows present for an empty matrix")
        return np.zeros((rows, cols))
    if len(body) != rows:
        raise MatrixFormatError(f"header declares {rows} rows, found {len(body)}")
    out = np.empty((rows, cols))
    for i, ln in enumerate(body):
        fields = ln.split()
        if len(fields) != cols:
            raise MatrixFormatError(
                f"row {i} has {len(fields)} entries, header declares {cols}"
            )
        try:
            out[i] = [float(f) for f in fields]
        except ValueError as exc:
            raise MatrixFormatError(f"row {i}: {exc}") from exc
    return out


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
