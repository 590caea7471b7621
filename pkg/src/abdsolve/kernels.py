"""Exact-count block kernels: packed LU, triangular solves, multiply-subtract.

Every kernel charges a :class:`FlopLedger` with the exact number of
multiplications plus divisions it performs.  Additions, subtractions and
comparisons are free.  Counts depend only on operand shapes, never on values,
so structurally zero operands are charged like any other.

All products use a fixed summation order (inner index ascending) so results
are reproducible bit for bit across BLAS builds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroDiagonalError, ZeroPivotError


def lu_cost(k: int) -> int:
    """Multiplications (incl. divisions) of an in-place k-by-k LU."""
    return (k * k * k - k) // 3


def trisolve_cost(k: int, ncols: int, unit: bool) -> int:
    """Cost of solving a k-by-k triangle against ``ncols`` vectors."""
    half = (k * k - k) // 2 if unit else (k * k + k) // 2
    return half * ncols


def matmul_cost(a: int, b: int, c: int) -> int:
    return a * b * c


@dataclass
class FlopLedger:
    """Running count of multiplications and divisions since the last reset."""

    mul: int = 0

    def add(self, count: int) -> None:
        self.mul += count

    def reset(self) -> None:
        self.mul = 0


def fixed_matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``left @ right`` summed with the inner index ascending.

    Bit-identical to a naive triple loop with the same (fixed) order.
    """
    out = np.zeros((left.shape[0], right.shape[1]))
    for t in range(left.shape[1]):
        out += left[:, t : t + 1] * right[t : t + 1, :]
    return out


def mult_sub(target, left, right, ledger: FlopLedger):
    """In place ``target -= left @ right``; charges ``a*b*c``.

    Accumulates rank-1 terms with the inner index ascending, so the result
    is bit-identical to a naive triple loop subtracting term by term.
    Returns ``target`` for convenience; zero-size operands charge 0.
    """
    a, b = left.shape
    b2, c = right.shape
    if b != b2 or target.shape != (a, c):
        raise ValueError(
            f"mult_sub shape mismatch: {target.shape} -= {left.shape} @ {right.shape}"
        )
    ledger.add(matmul_cost(a, b, c))
    for t in range(b):
        target -= left[:, t : t + 1] * right[t : t + 1, :]
    return target


def mult_add(target, left, right, ledger: FlopLedger):
    """In place ``target += left @ right``; charges ``a*b*c``."""
    a, b = left.shape
    _, c = right.shape
    ledger.add(matmul_cost(a, b, c))
    for t in range(b):
        target += left[:, t : t + 1] * right[t : t + 1, :]
    return target


def neg_mult(left, right, ledger: FlopLedger) -> np.ndarray:
    """Return ``-(left @ right)``; charges ``a*b*c``."""
    a, b = left.shape
    _, c = right.shape
    ledger.add(matmul_cost(a, b, c))
    return -fixed_matmul(left, right)


@dataclass
class TriangularFactorPair:
    """Both triangular factors of a square block, packed in one array.

    ``kind`` is ``"row"`` for row elimination (unit lower factor, written
    L-hat) or ``"column"`` for column elimination (unit upper factor).  The
    strict opposite triangle of the packed array holds the multipliers.
    """

    storage: np.ndarray
    kind: str  # "row" | "column"

    @property
    def order(self) -> int:
        return self.storage.shape[0]

    @property
    def unit_lower(self) -> bool:
        return self.kind == "row"

    @property
    def unit_upper(self) -> bool:
        return self.kind == "column"

    def lower(self) -> np.ndarray:
        out = np.tril(self.storage)
        if self.unit_lower:
            np.fill_diagonal(out, 1.0)
        return out

    def upper(self) -> np.ndarray:
        out = np.triu(self.storage)
        if self.unit_upper:
            np.fill_diagonal(out, 1.0)
        return out

    def reconstruct(self) -> np.ndarray:
        """L @ U, for verification."""
        return fixed_matmul(self.lower(), self.upper())


def lu_factor(block: np.ndarray, mode: str, ledger: FlopLedger) -> TriangularFactorPair:
    """Factor a square block in place, no interchanges; charges (k^3-k)/3.

    ``mode`` selects which factor carries the implicit unit diagonal:
    ``"row"`` gives L-hat U, ``"column"`` gives L U-hat.  Pivot selection is
    the caller's job; an exactly zero pivot raises :class:`ZeroPivotError`.
    """
    if mode not in ("row", "column"):
        raise ValueError(f"unknown factorization mode {mode!r}")
    k = block.shape[0]
    if block.shape != (k, k):
        raise ValueError(f"lu_factor needs a square block, got {block.shape}")
    ledger.add(lu_cost(k))
    for i in range(k):
        piv = block[i, i]
        if piv == 0.0:
            raise ZeroPivotError(i)
        if mode == "row":
            block[i + 1 :, i] /= piv
        else:
            block[i, i + 1 :] /= piv
        block[i + 1 :, i + 1 :] -= block[i + 1 :, i : i + 1] * block[i : i + 1, i + 1 :]
    return TriangularFactorPair(block, mode)


def solve_packed(storage, which, unit, operand, side, ledger: FlopLedger):
    """Solve one triangle of a packed factor against ``operand``, in place.

    ``which`` is "L" or "U"; ``side`` "left" solves ``T @ X = B``, "right"
    solves ``X @ T = B``.  Charges (k^2 -+ k)/2 per solved vector (minus for
    a unit triangle).  Updates use ascending substitution order.
    """
    k = storage.shape[0]
    ncols = operand.shape[1] if side == "left" else operand.shape[0]
    ledger.add(trisolve_cost(k, ncols, unit))
    if k == 0 or ncols == 0:
        return operand
    if not unit:
        diag = np.diagonal(storage)
        zero = np.nonzero(diag == 0.0)[0]
        if zero.size:
            raise ZeroDiagonalError(int(zero[0]))
    if which == "L":
        if side == "left":  # forward substitution
            for s in range(k):
                if not unit:
                    operand[s] /= storage[s, s]
                operand[s + 1 :] -= storage[s + 1 :, s : s + 1] * operand[s : s + 1]
        else:  # X @ L = B, columns solved last to first
            for s in range(k - 1, -1, -1):
                if not unit:
                    operand[:, s] /= storage[s, s]
                operand[:, :s] -= operand[:, s : s + 1] * storage[s : s + 1, :s]
    elif which == "U":
        if side == "left":  # back substitution
            for s in range(k - 1, -1, -1):
                if not unit:
                    operand[s] /= storage[s, s]
                operand[:s] -= storage[:s, s : s + 1] * operand[s : s + 1]
        else:  # X @ U = B, columns solved first to last
            for s in range(k):
                if not unit:
                    operand[:, s] /= storage[s, s]
                operand[:, s + 1 :] -= operand[:, s : s + 1] * storage[s : s + 1, s + 1 :]
    else:
        raise ValueError(f"unknown triangle {which!r}")
    return operand


def tri_solve(factors: TriangularFactorPair, which, operand, side, ledger: FlopLedger):
    """Solve against one triangle of a factor pair, in place.

    The unit diagonal follows the pair's kind: row mode makes L unit,
    column mode makes U unit.
    """
    k = factors.order
    if side == "left":
        if operand.shape[0] != k:
            raise ValueError(f"left solve: operand rows {operand.shape[0]} != {k}")
    else:
        if operand.shape[1] != k:
            raise ValueError(f"right solve: operand cols {operand.shape[1]} != {k}")
    unit = factors.unit_lower if which == "L" else factors.unit_upper
    return solve_packed(factors.storage, which, unit, operand, side, ledger)
