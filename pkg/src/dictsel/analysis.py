"""Well-posedness checks and subspace-counting analytics.

The null-space conditions for boundedness and uniqueness reduce to spark
tests on single columns: a nonzero matrix in ``Null(Phi) ∩ K_s ∩ P_t`` exists
iff some nonzero s-sparse vector lies in ``Null(Phi)`` (whenever ``s <= t``),
because one such column padded with zero columns is already a member.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionError, RefusalError
from .linop import MotherDictionary
from .sparsity import ModelParams

DEFAULT_ENUMERATION_CAP = 2_000_000
RANK_RTOL = 1e-10
_EXACT_BINOMIAL_MAX_N = 20_000


def binary_entropy(tau: float) -> float:
    """``-tau log2 tau - (1 - tau) log2(1 - tau)`` with ``0 log 0 = 0``."""
    if not 0.0 <= tau <= 1.0:
        raise PreconditionError(f"tau must lie in [0, 1], got {tau}")
    if tau == 0.0 or tau == 1.0:
        return 0.0
    return -tau * math.log2(tau) - (1.0 - tau) * math.log2(1.0 - tau)


def log2_binomial(n: int, k: int) -> float:
    if n <= _EXACT_BINOMIAL_MAX_N:
        return math.log2(math.comb(n, k))
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / math.log(2)


@dataclass(frozen=True)
class SubspaceCount:
    k: int
    p: int
    n: int
    L: int
    R_exact: float
    f_value: Optional[float]
    lower_bound: Optional[float]
    upper_bound: Optional[float]

    @property
    def bounds_available(self) -> bool:
        return self.f_value is not None


def entropy_exponent(k: int, p: int, n: int, L: int) -> float:
    """``n H(p/n) + L p H(k/p) - n L H(k/n)``."""
    return (
        n * binary_entropy(p / n)
        + L * p * binary_entropy(k / p)
        - n * L * binary_entropy(k / n)
    )


def explicit_exponent(k: int, p: int, n: int, L: int) -> float:
    """Closed form of :func:`entropy_exponent`, defined for ``k < p < n``."""
    lg = math.log2
    head = n * lg(n / (n - p)) + p * lg((n - p) / p)
    tail = n * lg(n / (n - k)) - p * lg(p / (p - k)) + k * lg((n - k) / (p - k))
    return head - L * tail


def subspace_reduction(k: int, p: int, n: int, L: int) -> SubspaceCount:
    """log2 of ``C(p,k)^L C(n,p) / C(n,k)^L`` with its entropy approximation and bounds.

    ``f``/bounds are reported as ``None`` when ``k == p`` or ``p == n``.
    """
    if not (1 <= k <= p <= n) or L < 1:
        raise PreconditionError(f"need 1 <= k <= p <= n and L >= 1, got {(k, p, n, L)}")
    R = L * (log2_binomial(p, k) - log2_binomial(n, k)) + log2_binomial(n, p)
    if k == p or p == n:
        return SubspaceCount(k, p, n, L, R, None, None, None)
    f = explicit_exponent(k, p, n, L)
    lower = -L * math.log2(p + 1) - math.log2(n + 1) + f
    upper = L * math.log2(n + 1) + f
    return SubspaceCount(k, p, n, L, R, f, lower, upper)


def _dense(phi) -> np.ndarray:
    if isinstance(phi, MotherDictionary):
        return phi.materialize()
    A = np.asarray(phi, dtype=float)
    if A.ndim != 2:
        raise PreconditionError("dictionary must be a 2-D matrix")
    return A


def _subsets_full_rank(A, subsets, rtol):
    sub = A[:, subsets]  # (m, B, s)
    sv = np.linalg.svd(np.moveaxis(sub, 1, 0), compute_uv=False)  # (B, s)
    return np.all(sv[:, -1] > rtol * sv[:, 0])


def spark_exceeds(
    phi,
    s: int,
    *,
    rtol: float = RANK_RTOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
    on_cap: str = "raise",
    n_samples: int = 10_000,
    seed: Optional[int] = None,
    batch: int = 4096,
) -> bool:
    """True iff every ``s``-column subset of ``phi`` has numerical rank ``s``.

    Equivalently, ``spark(phi) > s``.  For ``s >= n`` the full column set is
    tested.  When ``C(n, s)`` exceeds ``cap`` the call raises
    :class:`RefusalError`, or with ``on_cap="sample"`` checks ``n_samples``
    random subsets and emits a warning (a sampled ``True`` is not a proof).
    """
    A = _dense(phi)
    m, n = A.shape
    if s <= 0:
        return True
    s = min(s, n)
    if s > m:
        return False
    total = math.comb(n, s)
    if total > cap:
        if on_cap != "sample":
            raise RefusalError(f"C({n}, {s}) = {total} subsets exceeds cap {cap}")
        warnings.warn(
            f"spark check sampled {n_samples} of {total} subsets; result is not exhaustive",
            stacklevel=2,
        )
        rng = np.random.default_rng(seed)
        for start in range(0, n_samples, batch):
            cnt = min(batch, n_samples - start)
            subsets = np.argsort(rng.random((cnt, n)), axis=1)[:, :s]
            if not _subsets_full_rank(A, subsets, rtol):
                return False
        return True
    it = itertools.combinations(range(n), s)
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            return True
        if not _subsets_full_rank(A, np.array(chunk, dtype=np.intp), rtol):
            return False


def check_boundedness(phi, params: ModelParams, **kw) -> bool:
    """Whether ``Null(Phi) ∩ K ∩ P = {0}``, i.e. ``spark(Phi) > k``."""
    if params.k > params.p:
        raise PreconditionError(f"need k <= p, got k={params.k}, p={params.p}")
    return spark_exceeds(phi, params.k, **kw)


def check_uniqueness_sufficient(phi, params: ModelParams, **kw) -> bool:
    """Sufficient uniqueness test ``Null(Phi) ∩ K_2k ∩ P_2p = {0}``, i.e. ``spark(Phi) > 2k``.

    Requires ``k <= m/2`` and ``p <= n/2``.
    """
    A = _dense(phi)
    m, n = A.shape
    if 2 * params.k > m:
        raise PreconditionError(f"uniqueness check needs k <= m/2, got k={params.k}, m={m}")
    if 2 * params.p > n:
        raise PreconditionError(f"uniqueness check needs p <= n/2, got p={params.p}, n={n}")
    if params.k > params.p:
        raise PreconditionError(f"need k <= p, got k={params.k}, p={params.p}")
    return spark_exceeds(A, 2 * params.k, **kw)
