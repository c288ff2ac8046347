"""Normalised iterative hard thresholding for single-signal k-sparse coding."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import NumericError, PreconditionError, ShapeError
from .linop import MotherDictionary, as_dictionary

SNR_CEILING_DB = 300.0


@dataclass(frozen=True)
class IhtConfig:
    k: int
    max_iters: int = 300
    stall_tol: float = 1e-8
    rho: float = 0.95
    beta: float = 0.5
    max_shrinks: int = 100

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise PreconditionError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.stall_tol > 0:
            raise PreconditionError(f"stall_tol must be positive, got {self.stall_tol}")


class IhtResult(NamedTuple):
    x: np.ndarray
    residual_trace: list


def _operator(D) -> MotherDictionary:
    if isinstance(D, MotherDictionary):
        return D
    A = np.asarray(D, dtype=float)
    if A.ndim != 2:
        raise ShapeError("dictionary must be a 2-D matrix")
    if A.shape[1] and np.any(np.linalg.norm(A, axis=0) == 0):
        raise NumericError("dictionary has a zero column")
    return as_dictionary(A)


def _hard_threshold(v, k):
    return _kernels.active.project_columns(v[:, None], k)[:, 0]


def iht_approx(D, y, cfg: IhtConfig) -> IhtResult:
    """k-sparse approximation of ``y`` in ``D``.

    Starts from zero with the support of ``H_k(D^T y)``.  The step is the exact
    line-search step on the current support; when thresholding changes the
    support the step shrinks by ``beta`` until
    ``mu <= rho ||dx||^2 / ||D dx||^2`` and the residual does not grow.
    """
    op = _operator(D)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != op.m:
        raise ShapeError(f"y must be a vector of length {op.m}, got shape {y.shape}")
    if cfg.k > op.n:
        raise PreconditionError(f"k={cfg.k} exceeds the {op.n} atoms of the dictionary")

    x = np.zeros(op.n)
    r = y.copy()
    res = float(np.linalg.norm(r))
    trace = [res]
    if res == 0.0:
        return IhtResult(x, trace)
    S = _hard_threshold(op.adjoint(y), cfg.k) != 0

    for it in range(cfg.max_iters):
        g = op.adjoint(r)
        gS = np.where(S, g, 0.0)
        if not np.any(gS):
            if not np.any(g):
                break
            gS = g
        DgS = op.forward(gS)
        den = float(DgS @ DgS)
        mu = float(gS @ gS) / den if den > 0 else 1.0

        x_new = _hard_threshold(x + mu * g, cfg.k)
        r_new = y - op.forward(x_new)
        res_new = float(np.linalg.norm(r_new))
        shrinks = 0
        while True:
            changed = not np.array_equal(x_new != 0, S)
            dx = x_new - x
            Ddx = r - r_new
            ddx2 = float(Ddx @ Ddx)
            ok_step = (not changed) or ddx2 == 0.0 or mu <= cfg.rho * float(dx @ dx) / ddx2
            if ok_step and res_new <= res:
                break
            if shrinks >= cfg.max_shrinks:
                x_new, r_new, res_new = x, r, res
                break
            mu *= cfg.beta
            shrinks += 1
            x_new = _hard_threshold(x + mu * g, cfg.k)
            r_new = y - op.forward(x_new)
            res_new = float(np.linalg.norm(r_new))
        if not math.isfinite(res_new):
            raise NumericError(f"non-finite residual at iteration {it}", iteration=it)

        prev = res
        x, r, res = x_new, r_new, res_new
        S = x != 0
        trace.append(res)
        if res == 0.0 or (prev - res) <= cfg.stall_tol * prev:
            break
    return IhtResult(x, trace)


@dataclass
class EvalResult:
    residuals: np.ndarray
    snr_db: np.ndarray  # NaN for all-zero signals
    mean_snr_db: float
    n_excluded: int


def snr_db(signal_norm: float, residual_norm: float) -> float:
    if signal_norm == 0.0:
        return float("nan")
    if residual_norm == 0.0:
        return SNR_CEILING_DB
    return min(SNR_CEILING_DB, 20.0 * math.log10(signal_norm / residual_norm))


def evaluate_dictionary(D, Y_test, cfg: IhtConfig) -> EvalResult:
    """Run IHT on every column of ``Y_test`` and summarise the fit.

    SNR is ``20 log10(||y|| / ||y - D x||)``, capped at 300 dB; zero columns are
    excluded from the mean and counted in ``n_excluded``.
    """
    op = _operator(D)
    Y = np.asarray(Y_test, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2 or Y.shape[0] != op.m:
        raise ShapeError(f"Y_test must have {op.m} rows, got shape {Y.shape}")
    L = Y.shape[1]
    residuals = np.empty(L)
    snrs = np.empty(L)
    for j in range(L):
        y = Y[:, j]
        x, _ = iht_approx(op, y, cfg)
        residuals[j] = float(np.linalg.norm(y - op.forward(x)))
        snrs[j] = snr_db(float(np.linalg.norm(y)), residuals[j])
    valid = ~np.isnan(snrs)
    mean = float(np.sum(snrs[valid]) / valid.sum()) if valid.any() else float("nan")
    return EvalResult(residuals, snrs, mean, int(L - valid.sum()))
