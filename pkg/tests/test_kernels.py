import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dictsel import _kernels

nb = _kernels.get_kernels("numba")
npk = _kernels.get_kernels("numpy")


@st.composite
def matrices(draw):
    n = draw(st.integers(1, 40))
    L = draw(st.integers(1, 6))
    # small integer values force lots of ties
    ints = draw(st.booleans())
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, (n, L)).astype(float) if ints else rng.standard_normal((n, L))
    k = draw(st.integers(1, n))
    p = draw(st.integers(1, n))
    return A, k, p


@settings(max_examples=300, deadline=None)
@given(matrices())
def test_backends_agree(case):
    A, k, p = case
    np.testing.assert_array_equal(nb.project_columns(A, k), npk.project_columns(A, k))
    for l2 in (True, False):
        np.testing.assert_array_equal(nb.project_rows(A, p, l2), npk.project_rows(A, p, l2))
        np.testing.assert_array_equal(
            nb.project_rows_columns(A, k, p, l2), npk.project_rows_columns(A, k, p, l2)
        )
    np.testing.assert_array_equal(nb.row_maxabs(A), npk.row_maxabs(A))


def test_large_k_uses_select_path():
    # k > 32 goes through quickselect instead of the insertion buffer
    rng = np.random.default_rng(3)
    A = rng.integers(-5, 6, (120, 7)).astype(float)
    for k in (33, 60, 119):
        np.testing.assert_array_equal(nb.project_columns(A, k), npk.project_columns(A, k))
        np.testing.assert_array_equal(nb.project_rows_columns(A, k, 90), npk.project_rows_columns(A, k, 90))


def test_lower_index_wins_ties():
    A = np.array([[1.0], [-1.0], [1.0], [0.5]])
    for kern in (nb, npk):
        np.testing.assert_array_equal(kern.project_columns(A, 2)[:, 0], [1.0, -1.0, 0.0, 0.0])
        np.testing.assert_array_equal(kern.project_rows(A, 1)[:, 0], [1.0, 0.0, 0.0, 0.0])


def test_inputs_not_modified():
    A = np.random.default_rng(0).standard_normal((10, 4))
    B = A.copy()
    for kern in (nb, npk):
        kern.project_rows_columns(A, 2, 5)
        kern.project_columns(A, 3)
        kern.project_rows(A, 3)
    np.testing.assert_array_equal(A, B)


def test_fortran_order_input():
    A = np.asfortranarray(np.random.default_rng(1).standard_normal((12, 5)))
    np.testing.assert_array_equal(nb.project_rows_columns(A, 2, 4), npk.project_rows_columns(A, 2, 4))


def test_empty_columns():
    A = np.zeros((5, 0))
    for kern in (nb, npk):
        assert kern.project_rows_columns(A, 2, 3).shape == (5, 0)
        assert kern.project_columns(A, 2).shape == (5, 0)


@pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("off", "numpy"), ("1", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, DICTSEL_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "import dictsel; print(dictsel.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.get_kernels("cuda")
