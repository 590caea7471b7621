"""Dense reference solver and comparison utilities."""
import numpy as np
import pytest

from abdsolve.oracle import dense_lu_solve, max_rel_diff


def test_identity():
    b = np.arange(3.0)
    rep = dense_lu_solve(np.eye(3), b)
    assert not rep.rank_deficient
    assert np.array_equal(rep.solution, b)


def test_permutation_needs_pivot():
    rep = dense_lu_solve(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([1.0, 2.0]))
    assert np.allclose(rep.solution, [2.0, 1.0])


def test_rank_deficient():
    rep = dense_lu_solve(np.ones((3, 3)), np.ones(3))
    assert rep.rank_deficient and rep.solution is None


def test_self_consistency_order_200():
    rng = np.random.default_rng(123)
    N = 200
    A = rng.uniform(-1, 1, (N, N)) + (N / 4) * np.eye(N)
    b = rng.uniform(-1, 1, N)
    rep = dense_lu_solve(A, b)
    res = np.abs(A @ rep.solution - b).max()
    denom = np.abs(A).sum(axis=1).max() * np.abs(rep.solution).max()
    assert res / denom <= 1e-11
    assert rep.pivot_growth >= 1.0


def test_max_rel_diff():
    a = np.array([1.0, 2.0])
    assert max_rel_diff(a, a) == 0.0
    assert max_rel_diff(np.array([2.0]), np.array([1.0])) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        max_rel_diff(np.zeros(2), np.zeros(3))


def test_two_solves_agree():
    rng = np.random.default_rng(7)
    A = rng.uniform(-1, 1, (40, 40)) + 10 * np.eye(40)
    b = rng.uniform(-1, 1, (40, 2))
    r1 = dense_lu_solve(A, b)
    r2 = np.linalg.solve(A, b)
    assert max_rel_diff(r1.solution, r2) <= 1e-9
