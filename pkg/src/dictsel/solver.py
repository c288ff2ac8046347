"""Alternating projected gradient for dictionary selection.

Solves ``min ||Y - Phi X||_F^2`` over coefficient matrices that are k-sparse
per column and p-sparse in rows.  Each iteration takes a gradient step with a
support-normalised step size, maps back with ``P_K(P_P(.))`` and backtracks
until the acceptance inequality holds, so the objective never increases.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import NumericError, PreconditionError, ShapeError, ZeroGradient
from .linop import MotherDictionary, as_dictionary
from .sparsity import ConstraintMode, ModelParams, Support, selected_atoms

log = logging.getLogger(__name__)


class StopReason(str, Enum):
    STALLED = "stalled"
    MAX_ITERS = "max_iters"
    ZERO_GRADIENT = "zero_gradient"


@dataclass(frozen=True)
class SolverConfig:
    params: ModelParams
    rho: float = 0.95
    beta: float = 0.5
    epsilon: Optional[float] = None  # None -> 1e-12 * ||Y||_F^2
    max_iters: int = 1000
    mode: ConstraintMode = ConstraintMode.KP
    init: str = "project"  # or "zero"
    order: str = "kp"  # composition order for mode KP
    row_norm: str = "l2"  # row ranking in P: "l2" (nearest point) or "linf"
    tie_break: str = "low"  # or "random"
    seed: Optional[int] = None  # only used by tie_break="random"
    max_shrinks: int = 100

    def __post_init__(self):
        object.__setattr__(self, "mode", ConstraintMode(self.mode))
        if not 0 < self.rho < 1:
            raise PreconditionError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 < self.beta < 1:
            raise PreconditionError(f"beta must lie in (0, 1), got {self.beta}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise PreconditionError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise PreconditionError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.init not in ("project", "zero"):
            raise PreconditionError(f"init must be 'project' or 'zero', got {self.init!r}")
        if self.order not in ("kp", "pk"):
            raise PreconditionError(f"order must be 'kp' or 'pk', got {self.order!r}")
        if self.row_norm not in ("l2", "linf"):
            raise PreconditionError(f"row_norm must be 'l2' or 'linf', got {self.row_norm!r}")
        if self.tie_break not in ("low", "random"):
            raise PreconditionError(f"tie_break must be 'low' or 'random', got {self.tie_break!r}")


@dataclass
class SolverReport:
    X_star: np.ndarray
    objective_trace: list
    iterations_run: int
    stop_reason: StopReason
    selected: list
    shrinks: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)


def _check_Y(phi: MotherDictionary, Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2 or Y.shape[0] != phi.m:
        raise ShapeError(f"Y must be {phi.m} x L, got shape {Y.shape}")
    if Y.shape[1] == 0:
        raise ShapeError("Y has no columns (L = 0)")
    if not np.all(np.isfinite(Y)):
        raise NumericError("Y contains non-finite entries")
    return Y


def objective(phi, Y, X) -> float:
    """``||Y - Phi X||_F^2``."""
    phi = as_dictionary(phi)
    PX = phi.forward(X)
    Y = np.asarray(Y, dtype=float)
    if PX.shape != Y.shape:
        raise ShapeError(f"Y shape {Y.shape} does not match Phi X shape {PX.shape}")
    R = Y - PX
    return float(np.sum(R * R))


def gradient(phi, Y, X) -> np.ndarray:
    """``2 Phi^T (Phi X - Y)``."""
    phi = as_dictionary(phi)
    PX = phi.forward(X)
    Y = np.asarray(Y, dtype=float)
    if PX.shape != Y.shape:
        raise ShapeError(f"Y shape {Y.shape} does not match Phi X shape {PX.shape}")
    return 2.0 * phi.adjoint(PX - Y)


def masked_step_size(phi, G, S) -> float:
    """Step ``||G_S||^2 / ||Phi G_S||^2`` with ``G`` zeroed off the support ``S``.

    ``S`` is a :class:`Support` or a boolean mask shaped like ``G``.  Raises
    :class:`ZeroGradient` when ``G_S`` vanishes.  If ``Phi G_S`` vanishes while
    ``G_S`` does not, returns 1.0 and leaves the rest to backtracking.
    """
    phi = as_dictionary(phi)
    G = np.asarray(G, dtype=float)
    mask = S.mask(G.shape[0]) if isinstance(S, Support) else np.asarray(S, dtype=bool)
    GS = np.where(mask, G, 0.0)
    num = float(np.sum(GS * GS))
    if num == 0.0:
        raise ZeroGradient("gradient vanishes on the support")
    PG = phi.forward(GS)
    den = float(np.sum(PG * PG))
    if den == 0.0:
        return 1.0
    return num / den


def _make_projector(config: SolverConfig, n: int) -> Callable[[np.ndarray], np.ndarray]:
    kern = _kernels.active
    k, p = config.params.k, config.params.p
    mode = config.mode
    l2 = config.row_norm == "l2"
    if mode is ConstraintMode.K_ONLY:
        base = lambda A: kern.project_columns(A, k)  # noqa: E731
    elif mode is ConstraintMode.P_ONLY:
        base = lambda A: kern.project_rows(A, p, l2)  # noqa: E731
    elif config.order == "kp":
        base = lambda A: kern.project_rows_columns(A, k, p, l2)  # noqa: E731
    else:
        base = lambda A: kern.project_rows(kern.project_columns(A, k), p, l2)  # noqa: E731
    if config.tie_break == "low":
        return base
    rng = np.random.default_rng(config.seed)

    def randomized(A):
        perm = rng.permutation(n)
        out = np.empty_like(A)
        out[perm] = base(A[perm])
        return out

    return randomized


def select(
    phi,
    Y,
    config: SolverConfig,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> SolverReport:
    """Run the alternating projected gradient selection.

    ``callback(i, X)`` is invoked with every accepted iterate, starting with
    the initial point at ``i = 0``.
    """
    phi = as_dictionary(phi)
    Y = _check_Y(phi, Y)
    n = phi.n
    config.params.validate(n)
    project = _make_projector(config, n)

    y_energy = float(np.sum(Y * Y))
    eps = config.epsilon if config.epsilon is not None else 1e-12 * y_energy
    if eps <= 0.0:
        eps = np.finfo(float).tiny

    X0 = project(phi.adjoint(Y))
    S = X0 != 0
    X = X0 if config.init == "project" else np.zeros_like(X0)
    R = phi.forward(X) - Y
    f = float(np.sum(R * R))
    trace = [f]
    shrinks: list[int] = []
    steps: list[float] = []
    if callback is not None:
        callback(0, X)

    stop = StopReason.MAX_ITERS
    accepted = 0
    for it in range(config.max_iters):
        G = 2.0 * phi.adjoint(R)
        if not np.all(np.isfinite(G)):
            raise NumericError(f"non-finite gradient at iteration {it}", iteration=it)
        try:
            mu = masked_step_size(phi, G, S)
        except ZeroGradient:
            if not np.any(G):
                stop = StopReason.ZERO_GRADIENT
                break
            # the support is locally optimal but off-support descent remains
            mu = masked_step_size(phi, G, np.ones_like(S))

        Z = project(X - mu * G)
        D = X - Z
        d2 = float(np.sum(D * D))
        if d2 < eps:
            stop = StopReason.STALLED
            break

        n_shrink = 0
        stalled = False
        while True:
            R_new = phi.forward(Z) - Y
            PD = R - R_new  # Phi (X - Z)
            pd2 = float(np.sum(PD * PD))
            f_new = float(np.sum(R_new * R_new))
            if not np.isfinite(f_new):
                raise NumericError(f"non-finite objective at iteration {it}", iteration=it)
            bound = np.inf if pd2 == 0.0 else 0.5 * config.rho * d2 / pd2
            if mu <= bound and f_new <= f:
                break
            if n_shrink >= config.max_shrinks:
                log.warning("line search hit %d shrinks at iteration %d", n_shrink, it)
                stalled = True
                break
            mu *= config.beta
            n_shrink += 1
            Z = project(X - mu * G)
            D = X - Z
            d2 = float(np.sum(D * D))
            if d2 < eps:
                stalled = True
                break
        shrinks.append(n_shrink)
        if stalled:
            stop = StopReason.STALLED
            break

        X, R, f = Z, R_new, f_new
        S = X != 0
        trace.append(f)
        steps.append(mu)
        accepted += 1
        if callback is not None:
            callback(accepted, X)

    return SolverReport(
        X_star=X,
        objective_trace=trace,
        iterations_run=accepted,
        stop_reason=stop,
        selected=selected_atoms(X),
        shrinks=shrinks,
        step_sizes=steps,
    )


def extract_dictionary(phi, report: SolverReport) -> np.ndarray:
    """The atoms used at least once by ``report.X_star``, in ascending index order."""
    phi = as_dictionary(phi)
    if not report.selected:
        return np.zeros((phi.m, 0))
    return phi.columns(report.selected)
