"""Kernel behavior: exact counts, factor/solve correctness, reproducibility."""
import numpy as np
import pytest

from abdsolve.errors import ZeroDiagonalError, ZeroPivotError
from abdsolve.kernels import (
    FlopLedger,
    TriangularFactorPair,
    fixed_matmul,
    lu_cost,
    lu_factor,
    mult_sub,
    neg_mult,
    solve_packed,
    tri_solve,
    trisolve_cost,
)


def test_lu_factor_diagonal_row_mode():
    led = FlopLedger()
    blk = np.array([[2.0, 0.0], [0.0, 3.0]])
    pair = lu_factor(blk, "row", led)
    assert led.mul == 2  # (8 - 2) / 3
    assert np.array_equal(pair.lower(), np.eye(2))
    assert np.array_equal(pair.upper(), np.diag([2.0, 3.0]))


def test_lu_factor_row_mode_reconstruction():
    led = FlopLedger()
    blk = np.array([[4.0, 2.0], [2.0, 3.0]])
    pair = lu_factor(blk, "row", led)
    assert np.allclose(pair.lower(), [[1, 0], [0.5, 1]])
    assert np.allclose(pair.upper(), [[4, 2], [0, 2]])
    assert np.allclose(pair.reconstruct(), [[4, 2], [2, 3]])


def test_lu_factor_column_mode_reconstruction():
    led = FlopLedger()
    blk = np.array([[4.0, 2.0], [2.0, 3.0]])
    pair = lu_factor(blk, "column", led)
    assert np.allclose(pair.lower(), [[4, 0], [2, 2]])
    assert np.allclose(pair.upper(), [[1, 0.5], [0, 1]])
    assert np.allclose(pair.reconstruct(), [[4, 2], [2, 3]])


def test_lu_factor_zero_pivot():
    with pytest.raises(ZeroPivotError):
        lu_factor(np.array([[0.0, 1.0], [1.0, 0.0]]), "row", FlopLedger())


@pytest.mark.parametrize("mode", ["row", "column"])
def test_factor_reconstruction_random(mode):
    rng = np.random.default_rng(99)
    for _ in range(1000):
        k = int(rng.integers(1, 7))
        blk = rng.uniform(-1, 1, (k, k)) + (k + 1) * np.eye(k)
        orig = blk.copy()
        pair = lu_factor(blk, mode, FlopLedger())
        err = np.abs(pair.reconstruct() - orig).max()
        assert err <= 1e-12 * np.abs(orig).max()


def test_tri_solve_unit_lower_example():
    led = FlopLedger()
    pair = TriangularFactorPair(np.array([[1.0, 0.0], [0.5, 1.0]]), "row")
    x = tri_solve(pair, "L", np.array([[4.0], [4.0]]), "left", led)
    assert np.allclose(x[:, 0], [4.0, 2.0])
    assert led.mul == 1


def test_tri_solve_nonunit_upper_example():
    led = FlopLedger()
    pair = TriangularFactorPair(np.array([[4.0, 2.0], [0.0, 2.0]]), "row")
    x = tri_solve(pair, "U", np.array([[4.0], [2.0]]), "left", led)
    assert np.allclose(x[:, 0], [0.5, 1.0])
    assert led.mul == 3  # (4 + 2)/2


def test_tri_solve_identity_still_charges():
    led = FlopLedger()
    pair = TriangularFactorPair(np.eye(3), "row")
    op = np.arange(6.0).reshape(3, 2)
    x = tri_solve(pair, "L", op.copy(), "left", led)
    assert np.array_equal(x, op)
    assert led.mul == trisolve_cost(3, 2, unit=True)


def test_tri_solve_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(100):
        k = int(rng.integers(1, 7))
        c = int(rng.integers(1, 4))
        pair = lu_factor(rng.uniform(-1, 1, (k, k)) + (k + 1) * np.eye(k), "row", FlopLedger())
        x = rng.uniform(-1, 1, (k, c))
        b = pair.upper() @ x
        got = tri_solve(pair, "U", b.copy(), "left", FlopLedger())
        assert np.abs(got - x).max() <= 1e-12 * max(1.0, np.abs(x).max())
        xr = rng.uniform(-1, 1, (c, k))
        br = xr @ pair.lower()
        gotr = tri_solve(pair, "L", br.copy(), "right", FlopLedger())
        assert np.abs(gotr - xr).max() <= 1e-12 * max(1.0, np.abs(xr).max())


def test_tri_solve_zero_diagonal():
    pair = TriangularFactorPair(np.array([[0.0, 1.0], [0.0, 1.0]]), "column")
    with pytest.raises(ZeroDiagonalError):
        tri_solve(pair, "L", np.ones((2, 1)), "left", FlopLedger())


def test_mult_sub_examples():
    led = FlopLedger()
    t = np.array([[5.0]])
    mult_sub(t, np.array([[2.0]]), np.array([[3.0]]), led)
    assert t[0, 0] == -1.0 and led.mul == 1

    led = FlopLedger()
    t = np.arange(6.0).reshape(2, 3)
    before = t.copy()
    mult_sub(t, np.zeros((2, 4)), np.zeros((4, 3)), led)
    assert np.array_equal(t, before)
    assert led.mul == 24  # zero operands still charge a*b*c


def test_mult_sub_bit_for_bit_vs_triple_loop():
    rng = np.random.default_rng(17)
    a, b, c = 4, 5, 3
    left = rng.uniform(-1, 1, (a, b))
    right = rng.uniform(-1, 1, (b, c))
    target = rng.uniform(-1, 1, (a, c))
    ref = target.copy()
    for i in range(a):
        for j in range(c):
            acc = ref[i, j]
            for t in range(b):
                acc = acc - left[i, t] * right[t, j]
            ref[i, j] = acc
    got = mult_sub(target.copy(), left, right, FlopLedger())
    assert np.array_equal(got, ref)


def test_neg_mult():
    led = FlopLedger()
    out = neg_mult(np.array([[2.0]]), np.array([[3.0]]), led)
    assert out[0, 0] == -6.0 and led.mul == 1
    led = FlopLedger()
    out = neg_mult(np.zeros((2, 3)), np.ones((3, 4)), led)
    assert np.array_equal(out, np.zeros((2, 4))) and led.mul == 24


def test_ledger_exactness_value_independent():
    # counts depend on shapes only
    for fill in (0.0, 1.0, -3.5):
        led = FlopLedger()
        blk = np.full((4, 4), fill) + 9 * np.eye(4)
        lu_factor(blk, "column", led)
        assert led.mul == lu_cost(4)
        led2 = FlopLedger()
        solve_packed(blk, "L", False, np.full((4, 3), fill), "left", led2)
        assert led2.mul == trisolve_cost(4, 3, unit=False)


def test_fixed_matmul_matches_dot():
    rng = np.random.default_rng(3)
    a = rng.uniform(-1, 1, (6, 4))
    b = rng.uniform(-1, 1, (4, 5))
    assert np.allclose(fixed_matmul(a, b), a @ b, atol=1e-14)
