"""Hard-thresholding kernels behind the K and P projections.

Two interchangeable implementations are provided: a vectorised numpy path
and a numba ``@njit`` path.  The numba path is used when numba imports and
the environment variable ``DICTSEL_NUMBA`` is not set to ``0``/``false``/``off``.

Rows are ranked by energy (sum of squares, which gives the nearest point of
the row-sparse set) or, with ``l2=False``, by max-abs entry.  Both paths break
ties between equal scores by keeping the lower index.  The numba path keeps a
small sorted buffer per column for k <= 32 and falls back to quickselect for
larger k.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------- numpy path


def _np_keep_mask_1d(a, count):
    n = a.shape[0]
    kth = np.partition(a, n - count)[n - count]
    gt = a > kth
    need = count - int(gt.sum())
    eq = a == kth
    return gt | (eq & (np.cumsum(eq) <= need))


def np_project_columns(A, k):
    n = A.shape[0]
    if k >= n:
        return A.copy()
    if A.shape[1] == 0:
        return A.copy()
    a = np.abs(A)
    kth = np.partition(a, n - k, axis=0)[n - k]
    gt = a > kth
    need = k - gt.sum(axis=0)
    eq = a == kth
    keep = gt | (eq & (np.cumsum(eq, axis=0) <= need))
    return np.where(keep, A, 0.0)


def np_row_maxabs(A):
    if A.shape[1] == 0:
        return np.zeros(A.shape[0])
    return np.abs(A).max(axis=1)


def np_row_energy(A):
    return np.einsum("ij,ij->i", A, A)


def np_project_rows(A, p, l2=True):
    n = A.shape[0]
    if p >= n:
        return A.copy()
    score = np_row_energy(A) if l2 else np_row_maxabs(A)
    keep = _np_keep_mask_1d(score, p)
    out = np.zeros_like(A)
    out[keep] = A[keep]
    return out


def np_project_rows_columns(A, k, p, l2=True):
    return np_project_columns(np_project_rows(A, p, l2), k)


numpy_kernels = SimpleNamespace(
    name="numpy",
    project_columns=np_project_columns,
    project_rows=np_project_rows,
    project_rows_columns=np_project_rows_columns,
    row_maxabs=np_row_maxabs,
)

# ---------------------------------------------------------------- numba path

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

if njit is not None:

    @njit(cache=True)
    def _nb_select_inplace(buf, target):
        """Value of ascending rank ``target`` in ``buf`` (Hoare quickselect; reorders buf)."""
        lo = 0
        hi = buf.shape[0] - 1
        while lo < hi:
            mid = (lo + hi) // 2
            a, b, c = buf[lo], buf[mid], buf[hi]
            if a > b:
                a, b = b, a
            if b > c:
                b = c
                if a > b:
                    b = a
            pivot = b
            i = lo
            j = hi
            while i <= j:
                while buf[i] < pivot:
                    i += 1
                while buf[j] > pivot:
                    j -= 1
                if i <= j:
                    tmp = buf[i]
                    buf[i] = buf[j]
                    buf[j] = tmp
                    i += 1
                    j -= 1
            if target <= j:
                hi = j
            elif target >= i:
                lo = i
            else:
                break
        return buf[target]

    @njit(cache=True)
    def _nb_columns_select(A, rows, out, k):
        # quickselect per column over A[rows]; O(len(rows)) per column
        n_r = rows.shape[0]
        L = A.shape[1]
        col = np.empty(n_r)
        buf = np.empty(n_r)
        for j in range(L):
            for r in range(n_r):
                v = abs(A[rows[r], j])
                col[r] = v
                buf[r] = v
            kth = _nb_select_inplace(buf, n_r - k)
            need = k
            for r in range(n_r):
                if col[r] > kth:
                    need -= 1
            for r in range(n_r):
                v = col[r]
                if v > kth:
                    out[rows[r], j] = A[rows[r], j]
                elif v == kth and need > 0:
                    out[rows[r], j] = A[rows[r], j]
                    need -= 1

    @njit(cache=True)
    def _nb_columns_insert(A, rows, out, k):
        # row-major sweep keeping a sorted top-k buffer per column; good for small k
        L = A.shape[1]
        vals = np.empty((L, k))
        idx = np.empty((L, k), dtype=np.int64)
        cnt = np.zeros(L, dtype=np.int64)
        thr = np.full(L, -1.0)
        for r in range(rows.shape[0]):
            i = rows[r]
            for j in range(L):
                v = abs(A[i, j])
                if v <= thr[j]:
                    continue  # ties with the current k-th go to the earlier row
                c = cnt[j]
                if c < k:
                    pos = c
                    cnt[j] = c + 1
                else:
                    pos = k - 1
                while pos > 0 and vals[j, pos - 1] < v:
                    vals[j, pos] = vals[j, pos - 1]
                    idx[j, pos] = idx[j, pos - 1]
                    pos -= 1
                vals[j, pos] = v
                idx[j, pos] = i
                if cnt[j] == k:
                    thr[j] = vals[j, k - 1]
        for j in range(L):
            for s in range(cnt[j]):
                out[idx[j, s], j] = A[idx[j, s], j]

    @njit(cache=True)
    def _nb_columns_inplace(A, rows, out, k):
        if k <= 32:
            _nb_columns_insert(A, rows, out, k)
        else:
            _nb_columns_select(A, rows, out, k)

    @njit(cache=True)
    def _nb_row_maxabs(A):
        n, L = A.shape
        r = np.zeros(n)
        for i in range(n):
            best = 0.0
            for j in range(L):
                v = abs(A[i, j])
                if v > best:
                    best = v
            r[i] = best
        return r

    @njit(cache=True)
    def _nb_row_energy(A):
        n, L = A.shape
        r = np.zeros(n)
        for i in range(n):
            acc = 0.0
            for j in range(L):
                acc += A[i, j] * A[i, j]
            r[i] = acc
        return r

    @njit(cache=True)
    def _nb_row_keep(A, p, l2):
        n = A.shape[0]
        r = _nb_row_energy(A) if l2 else _nb_row_maxabs(A)
        kth = _nb_select_inplace(r.copy(), n - p)
        need = p
        for i in range(n):
            if r[i] > kth:
                need -= 1
        keep = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            if r[i] > kth:
                keep[i] = True
            elif r[i] == kth and need > 0:
                keep[i] = True
                need -= 1
        return keep

    @njit(cache=True)
    def _nb_project_rows(A, p, l2):
        n, L = A.shape
        keep = _nb_row_keep(A, p, l2)
        out = np.zeros_like(A)
        for i in range(n):
            if keep[i]:
                for j in range(L):
                    out[i, j] = A[i, j]
        return out

    @njit(cache=True)
    def _nb_project_columns(A, k):
        out = np.zeros_like(A)
        _nb_columns_inplace(A, np.arange(A.shape[0]), out, k)
        return out

    @njit(cache=True)
    def _nb_project_rows_columns(A, k, p, l2):
        n = A.shape[0]
        if p < n:
            rows = np.flatnonzero(_nb_row_keep(A, p, l2))
        else:
            rows = np.arange(n)
        out = np.zeros_like(A)
        if k >= rows.shape[0]:
            for r in range(rows.shape[0]):
                out[rows[r]] = A[rows[r]]
        else:
            # rows outside ``rows`` are zero after the P step, so they can
            # only tie at zero and never change the output
            _nb_columns_inplace(A, rows, out, k)
        return out

    def nb_project_columns(A, k):
        if k >= A.shape[0] or A.shape[1] == 0:
            return A.copy()
        return _nb_project_columns(np.ascontiguousarray(A, dtype=np.float64), k)

    def nb_project_rows(A, p, l2=True):
        if p >= A.shape[0] or A.shape[1] == 0:
            return A.copy()
        return _nb_project_rows(np.ascontiguousarray(A, dtype=np.float64), p, bool(l2))

    def nb_project_rows_columns(A, k, p, l2=True):
        if A.shape[1] == 0:
            return A.copy()
        return _nb_project_rows_columns(np.ascontiguousarray(A, dtype=np.float64), k, p, bool(l2))

    def nb_row_maxabs(A):
        if A.shape[1] == 0:
            return np.zeros(A.shape[0])
        return _nb_row_maxabs(np.ascontiguousarray(A, dtype=np.float64))

    numba_kernels = SimpleNamespace(
        name="numba",
        project_columns=nb_project_columns,
        project_rows=nb_project_rows,
        project_rows_columns=nb_project_rows_columns,
        row_maxabs=nb_row_maxabs,
    )
else:  # pragma: no cover
    numba_kernels = None


def _numba_requested() -> bool:
    flag = os.environ.get("DICTSEL_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


def get_kernels(name: str | None = None) -> SimpleNamespace:
    """Return the kernel namespace for ``name`` ('numba' or 'numpy').

    With ``name=None`` the environment decides.
    """
    if name is None:
        name = "numba" if (_numba_requested() and numba_kernels is not None) else "numpy"
    if name == "numba":
        if numba_kernels is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return numba_kernels
    if name == "numpy":
        return numpy_kernels
    raise ValueError(f"unknown kernel backend {name!r}")


active = get_kernels()
BACKEND = active.name
