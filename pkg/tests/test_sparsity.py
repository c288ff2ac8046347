import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dictsel.errors import NumericError, PreconditionError
from dictsel.sparsity import (
    ConstraintMode,
    ModelParams,
    Support,
    project_K,
    project_KP,
    project_mode,
    project_P,
    selected_atoms,
    support_of,
)

from oracles import best_k_distance, best_kp_distance, best_p_distance, is_restriction

X3 = np.array([[3.0, 1.0], [-5.0, 2.0], [1.0, -4.0]])


def test_project_K_worked_example(backend):
    np.testing.assert_array_equal(project_K(X3, 1), [[0, 0], [-5, 0], [0, -4]])


def test_project_P_worked_example(backend):
    np.testing.assert_array_equal(project_P(X3, 2), [[0, 0], [-5, 2], [1, -4]])


def test_row_norm_choice(backend):
    # row 0 has the largest single entry, row 1 the most energy
    X = np.array([[3.0, 0.0, 0.0], [2.0, 2.0, 2.0], [0.1, 0.0, 0.0]])
    np.testing.assert_array_equal(project_P(X, 1), [[0, 0, 0], [2, 2, 2], [0, 0, 0]])
    np.testing.assert_array_equal(project_P(X, 1, row_norm="linf"), [[3, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert np.sum((X - project_P(X, 1)) ** 2) == best_p_distance(X, 1)
    with pytest.raises(ValueError):
        project_P(X, 1, row_norm="l1")


def test_row_norms_agree_on_single_column(backend):
    x = np.random.default_rng(5).standard_normal((9, 1))
    np.testing.assert_array_equal(project_P(x, 4), project_P(x, 4, row_norm="linf"))


def test_already_sparse_unchanged(backend):
    X = np.array([[0.0, 2.0], [1.0, 0.0], [0.0, 0.0]])
    np.testing.assert_array_equal(project_K(X, 1), X)
    np.testing.assert_array_equal(project_P(X, 2), X)


def test_zero_matrix(backend):
    Z = np.zeros((5, 3))
    np.testing.assert_array_equal(project_KP(Z, ModelParams(2, 3)), Z)
    assert support_of(Z).rows == frozenset()
    assert selected_atoms(Z) == []


def test_brute_force_6x4(backend):
    rng = np.random.default_rng(11)
    X = rng.standard_normal((6, 4))
    assert np.isclose(np.sum((X - project_K(X, 2)) ** 2), best_k_distance(X, 2), rtol=0, atol=1e-12)
    assert np.isclose(np.sum((X - project_P(X, 3)) ** 2), best_p_distance(X, 3), rtol=0, atol=1e-12)
    Z = project_KP(X, ModelParams(1, 2))
    assert support_of(Z).certifies(ModelParams(1, 2))
    assert np.sum((X - Z) ** 2) >= best_kp_distance(X, 1, 2) - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 4), st.integers(0, 2**31), st.data())
def test_projection_optimality(n, L, seed, data):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, L))
    k = data.draw(st.integers(1, n))
    p = data.draw(st.integers(k, n))
    ZK = project_K(X, k)
    ZP = project_P(X, p)
    assert is_restriction(ZK, X) and is_restriction(ZP, X)
    assert np.isclose(np.sum((X - ZK) ** 2), best_k_distance(X, k), atol=1e-12)
    assert np.isclose(np.sum((X - ZP) ** 2), best_p_distance(X, p), atol=1e-12)
    params = ModelParams(k, p)
    for order in ("kp", "pk"):
        for row_norm in ("l2", "linf"):
            Z = project_KP(X, params, order=order, row_norm=row_norm)
            assert support_of(Z).certifies(params)
            assert is_restriction(Z, X)
            assert np.sum((X - Z) ** 2) >= best_kp_distance(X, k, p) - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 6), st.integers(0, 2**31), st.data())
def test_idempotence_and_closure(n, L, seed, data):
    rng = np.random.default_rng(seed)
    X = rng.integers(-3, 4, (n, L)).astype(float)
    k = data.draw(st.integers(1, n))
    p = data.draw(st.integers(k, n))
    params = ModelParams(k, p)
    ZK, ZP, ZKP = project_K(X, k), project_P(X, p), project_KP(X, params)
    np.testing.assert_array_equal(project_K(ZK, k), ZK)
    np.testing.assert_array_equal(project_P(ZP, p), ZP)
    np.testing.assert_array_equal(project_KP(ZKP, params), ZKP)
    assert support_of(project_P(ZK, p)).certifies(params)
    assert support_of(project_K(ZP, k)).certifies(params)
    assert np.linalg.norm(X - ZK) <= np.linalg.norm(X)
    assert np.all(np.abs(ZK) <= np.abs(X))


def test_ties_lower_index(backend):
    X = np.array([[2.0], [2.0], [-2.0]])
    np.testing.assert_array_equal(project_K(X, 1)[:, 0], [2, 0, 0])
    np.testing.assert_array_equal(project_P(X, 2)[:, 0], [2, 2, 0])


def test_random_tie_break_covers_alternatives():
    X = np.array([[1.0], [1.0], [1.0]])
    rng = np.random.default_rng(0)
    picks = {int(np.flatnonzero(project_K(X, 1, rng=rng)[:, 0])[0]) for _ in range(60)}
    assert picks == {0, 1, 2}


def test_project_mode_dispatch(backend):
    X = np.random.default_rng(4).standard_normal((7, 5))
    params = ModelParams(2, 3)
    np.testing.assert_array_equal(project_mode(X, params, ConstraintMode.K_ONLY), project_K(X, 2))
    np.testing.assert_array_equal(project_mode(X, params, "p_only"), project_P(X, 3))
    np.testing.assert_array_equal(project_mode(X, params, "kp"), project_K(project_P(X, 3), 2))


def test_support_bookkeeping():
    X = np.zeros((9, 3))
    X[2, 0] = 1.0
    X[7, 1] = -2.0
    X[2, 2] = 0.5
    S = support_of(X)
    assert S.rows == frozenset({2, 7})
    assert S.cols == (frozenset({2}), frozenset({7}), frozenset({2}))
    assert S.rows == frozenset().union(*S.cols)
    assert selected_atoms(X) == [2, 7]
    assert S.certifies(ModelParams(1, 2)) and not S.certifies(ModelParams(1, 1))
    assert S.certifies(ModelParams(1, 1), ConstraintMode.K_ONLY)
    np.testing.assert_array_equal(S.mask(9), X != 0)
    one_hot = np.zeros((4, 2))
    one_hot[1, 1] = 3.0
    S1 = support_of(one_hot)
    assert S1.rows == {1} and S1.cols == (frozenset(), frozenset({1}))
    assert isinstance(S1, Support)


def test_validation():
    with pytest.raises(PreconditionError):
        project_K(np.ones((3, 2)), 0)
    with pytest.raises(PreconditionError):
        project_P(np.ones((3, 2)), 4)
    with pytest.raises(PreconditionError):
        project_KP(np.ones((3, 2)), ModelParams(3, 2))
    with pytest.raises(NumericError):
        project_K(np.array([[np.inf], [0.0]]), 1)
    with pytest.raises(ValueError):
        project_KP(np.ones((3, 2)), ModelParams(1, 2), order="xx")
