"""Mother dictionaries as linear operators.

Two kinds are provided: :class:`DenseDictionary`, an explicit ``m x n`` matrix
with unit-norm columns, and :class:`DctDiracDictionary`, a ``q``-times
frequency-oversampled DCT followed by the ``m`` Dirac atoms, applied through
fast cosine transforms without forming the matrix.
"""
from __future__ import annotations

import numpy as np
import scipy.fft

from .errors import NumericError, PreconditionError, RefusalError, ShapeError

DEFAULT_MATERIALIZE_CAP = 20_000_000  # entries


def _as_2d(A, name):
    A = np.asarray(A, dtype=float)
    vec = A.ndim == 1
    if vec:
        A = A[:, None]
    if A.ndim != 2:
        raise ShapeError(f"{name} must be 1-D or 2-D, got ndim={A.ndim}")
    return A, vec


class MotherDictionary:
    """Base class: an ``m x n`` real operator with unit-norm columns."""

    m: int
    n: int

    @property
    def shape(self):
        return (self.m, self.n)

    def forward(self, X):
        X, vec = _as_2d(X, "X")
        if X.shape[0] != self.n:
            raise ShapeError(f"X has {X.shape[0]} rows, dictionary has {self.n} atoms")
        Y = self._forward(X)
        return Y[:, 0] if vec else Y

    def adjoint(self, R):
        R, vec = _as_2d(R, "R")
        if R.shape[0] != self.m:
            raise ShapeError(f"R has {R.shape[0]} rows, signal dimension is {self.m}")
        X = self._adjoint(R)
        return X[:, 0] if vec else X

    def materialize(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> np.ndarray:
        if self.m * self.n > cap:
            raise RefusalError(
                f"materializing {self.m}x{self.n} exceeds the cap of {cap} entries"
            )
        return self._materialize()

    def columns(self, idx) -> np.ndarray:
        """The atoms at ``idx`` as an ``m x len(idx)`` matrix."""
        idx = np.asarray(idx, dtype=int)
        E = np.zeros((self.n, idx.size))
        E[idx, np.arange(idx.size)] = 1.0
        return self._forward(E)

    # subclasses implement these on validated 2-D input
    def _forward(self, X):
        raise NotImplementedError

    def _adjoint(self, R):
        raise NotImplementedError

    def _materialize(self):
        raise NotImplementedError


class DenseDictionary(MotherDictionary):
    """Explicit matrix.  Columns are rescaled to unit norm at construction."""

    def __init__(self, matrix, normalize: bool = True):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2:
            raise ShapeError("dictionary matrix must be 2-D")
        if not np.all(np.isfinite(A)):
            raise NumericError("dictionary matrix contains non-finite entries")
        norms = np.linalg.norm(A, axis=0)
        if np.any(norms == 0):
            raise NumericError(f"zero atom(s) at columns {np.flatnonzero(norms == 0).tolist()}")
        if normalize:
            # already-unit columns are left bit-for-bit untouched
            if not np.allclose(norms, 1.0, rtol=0.0, atol=1e-12):
                A /= norms
        elif not np.allclose(norms, 1.0, atol=1e-10):
            raise PreconditionError("atoms must have unit Euclidean norm")
        A.setflags(write=False)
        self.matrix = A
        self.m, self.n = A.shape

    def _forward(self, X):
        return self.matrix @ X

    def _adjoint(self, R):
        return self.matrix.T @ R

    def _materialize(self):
        return self.matrix

    def columns(self, idx):
        return self.matrix[:, np.asarray(idx, dtype=int)]

    def __repr__(self):
        return f"DenseDictionary(m={self.m}, n={self.n})"


class DctDiracDictionary(MotherDictionary):
    """Oversampled DCT plus Dirac atoms.

    Atom ``j < q*m`` samples ``cos(pi * (t + 0.5) * j / (q*m))`` for
    ``t = 0..m-1`` and is scaled to unit norm; atoms ``q*m .. q*m + m - 1`` are
    the canonical basis vectors.
    """

    def __init__(self, m: int, q: int = 2):
        if m < 1 or q < 1:
            raise PreconditionError(f"need m >= 1 and q >= 1, got m={m}, q={q}")
        self.m = int(m)
        self.q = int(q)
        self.n_dct = self.q * self.m
        self.n = self.n_dct + self.m
        self._scale = 1.0 / np.sqrt(self._dct_sq_norms())

    def _dct_sq_norms(self):
        t = np.arange(self.m) + 0.5
        out = np.empty(self.n_dct)
        step = max(1, 4_000_000 // self.m)
        for s in range(0, self.n_dct, step):
            j = np.arange(s, min(s + step, self.n_dct))
            out[s : s + j.size] = (np.cos(np.pi * np.outer(t, j) / self.n_dct) ** 2).sum(axis=0)
        return out

    def _forward(self, X):
        N = self.n_dct
        C = X[:N] * self._scale[:, None]
        C[1:] *= 0.5
        # unnormalized DCT-III: y_t = c_0 + 2 sum_{j>0} c_j cos(pi j (2t+1) / 2N)
        Y = scipy.fft.dct(C, type=3, axis=0)[: self.m]
        return Y + X[N:]

    def _adjoint(self, R):
        N = self.n_dct
        padded = np.zeros((N, R.shape[1]))
        padded[: self.m] = R
        # unnormalized DCT-II: y_j = 2 sum_t r_t cos(pi j (2t+1) / 2N)
        U = 0.5 * scipy.fft.dct(padded, type=2, axis=0)
        return np.vstack([U * self._scale[:, None], R])

    def _materialize(self):
        t = np.arange(self.m) + 0.5
        j = np.arange(self.n_dct)
        dct = np.cos(np.pi * np.outer(t, j) / self.n_dct)
        dct /= np.linalg.norm(dct, axis=0)
        return np.hstack([dct, np.eye(self.m)])

    def __repr__(self):
        return f"DctDiracDictionary(m={self.m}, q={self.q})"


def as_dictionary(phi) -> MotherDictionary:
    if isinstance(phi, MotherDictionary):
        return phi
    return DenseDictionary(phi)


def forward(phi: MotherDictionary, X):
    return phi.forward(X)


def adjoint(phi: MotherDictionary, R):
    return phi.adjoint(R)


def materialize(phi: MotherDictionary, cap: int = DEFAULT_MATERIALIZE_CAP) -> np.ndarray:
    return phi.materialize(cap)
