"""Coefficient-matrix model: the column-sparse set K, the row-sparse set P,
their projections and support bookkeeping.

Coefficient matrices are plain ``(n, L)`` float arrays.  ``K`` holds matrices
with at most ``k`` nonzeros per column, ``P`` those with at most ``p`` nonzero
rows (a row counts as nonzero when its max-abs entry is nonzero).

``project_P`` ranks rows by energy by default, which makes it the nearest
point of ``P`` in Frobenius norm.  ``row_norm="linf"`` ranks by max-abs entry
instead; with a single column the two agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import NumericError, PreconditionError, ShapeError


class ConstraintMode(str, Enum):
    KP = "kp"
    K_ONLY = "k_only"
    P_ONLY = "p_only"


@dataclass(frozen=True)
class ModelParams:
    k: int
    p: int

    def validate(self, n: int, m: int | None = None) -> None:
        if not (1 <= self.k <= self.p <= n):
            raise PreconditionError(
                f"need 1 <= k <= p <= n, got k={self.k}, p={self.p}, n={n}"
            )

    def well_posed(self, m: int) -> bool:
        """k < m, the generic-boundedness regime."""
        return self.k < m


@dataclass(frozen=True)
class Support:
    rows: frozenset
    cols: tuple

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def max_col_count(self) -> int:
        return max((len(c) for c in self.cols), default=0)

    def in_K(self, k: int) -> bool:
        return all(len(c) <= k for c in self.cols)

    def in_P(self, p: int) -> bool:
        return len(self.rows) <= p

    def certifies(self, params: ModelParams, mode=ConstraintMode.KP) -> bool:
        mode = ConstraintMode(mode)
        if mode is ConstraintMode.K_ONLY:
            return self.in_K(params.k)
        if mode is ConstraintMode.P_ONLY:
            return self.in_P(params.p)
        return self.in_K(params.k) and self.in_P(params.p)

    def mask(self, n: int) -> np.ndarray:
        M = np.zeros((n, len(self.cols)), dtype=bool)
        for j, c in enumerate(self.cols):
            M[list(c), j] = True
        return M


def as_coeffs(X, n: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ShapeError(f"coefficient matrix must be 2-D, got ndim={X.ndim}")
    if n is not None and X.shape[0] != n:
        raise ShapeError(f"coefficient matrix has {X.shape[0]} rows, expected {n}")
    if not np.all(np.isfinite(X)):
        raise NumericError("coefficient matrix contains non-finite entries")
    return X


def _check_count(name, value, n):
    if not (1 <= value <= n):
        raise PreconditionError(f"need 1 <= {name} <= n={n}, got {name}={value}")


ROW_NORMS = ("l2", "linf")


def _check_row_norm(row_norm):
    if row_norm not in ROW_NORMS:
        raise ValueError(f"row_norm must be 'l2' or 'linf', got {row_norm!r}")
    return row_norm == "l2"


def _random_tiebreak(fn, X, rng):
    perm = rng.permutation(X.shape[0])
    out = np.empty_like(X)
    out[perm] = fn(X[perm])
    return out


def project_K(X, k: int, *, rng: np.random.Generator | None = None) -> np.ndarray:
    """Keep the ``k`` largest-magnitude entries of every column.

    Equal magnitudes resolve towards the lower row index, unless ``rng`` is
    given, in which case ties are broken by a random row permutation.
    """
    X = as_coeffs(X)
    _check_count("k", k, X.shape[0])
    fn = lambda A: _kernels.active.project_columns(A, k)  # noqa: E731
    return fn(X) if rng is None else _random_tiebreak(fn, X, rng)


def project_P(
    X,
    p: int,
    *,
    row_norm: str = "l2",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Keep the ``p`` highest-scoring rows and zero the rest.

    Rows score by energy (``row_norm="l2"``) or by max-abs entry (``"linf"``).
    """
    X = as_coeffs(X)
    _check_count("p", p, X.shape[0])
    l2 = _check_row_norm(row_norm)
    fn = lambda A: _kernels.active.project_rows(A, p, l2)  # noqa: E731
    return fn(X) if rng is None else _random_tiebreak(fn, X, rng)


def project_KP(
    X,
    params: ModelParams,
    *,
    order: str = "kp",
    row_norm: str = "l2",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Composite map into K ∩ P.

    ``order="kp"`` applies the row projection first and the column
    projection second (``P_K(P_P(X))``); ``order="pk"`` is the reverse
    composition.  Neither is the exact nearest point of K ∩ P, but both
    always land in it.
    """
    X = as_coeffs(X)
    params.validate(X.shape[0])
    k, p = params.k, params.p
    l2 = _check_row_norm(row_norm)
    if order == "kp":
        fn = lambda A: _kernels.active.project_rows_columns(A, k, p, l2)  # noqa: E731
    elif order == "pk":
        fn = lambda A: _kernels.active.project_rows(  # noqa: E731
            _kernels.active.project_columns(A, k), p, l2
        )
    else:
        raise ValueError(f"order must be 'kp' or 'pk', got {order!r}")
    return fn(X) if rng is None else _random_tiebreak(fn, X, rng)


def project_mode(X, params: ModelParams, mode=ConstraintMode.KP, **kw) -> np.ndarray:
    mode = ConstraintMode(mode)
    if mode is ConstraintMode.K_ONLY:
        return project_K(X, params.k, rng=kw.get("rng"))
    if mode is ConstraintMode.P_ONLY:
        return project_P(X, params.p, row_norm=kw.get("row_norm", "l2"), rng=kw.get("rng"))
    return project_KP(X, params, **kw)


def support_of(X) -> Support:
    X = as_coeffs(X)
    nz = X != 0
    cols = tuple(frozenset(np.flatnonzero(nz[:, j]).tolist()) for j in range(X.shape[1]))
    rows = frozenset(np.flatnonzero(nz.any(axis=1)).tolist())
    return Support(rows=rows, cols=cols)


def selected_atoms(X) -> list[int]:
    """Ascending indices of rows holding at least one nonzero."""
    X = as_coeffs(X)
    return np.flatnonzero((X != 0).any(axis=1)).tolist()
