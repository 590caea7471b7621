"""Independent dense reference solver used by the verification tests.

Deliberately shares nothing with the block kernels: a plain row-pivoted
dense LU with growth tracking.  Cubic cost is fine; it only ever sees
desk-scale matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class DenseSolveReport:
    solution: np.ndarray | None
    pivot_growth: float
    rank_deficient: bool


def dense_lu_solve(matrix: np.ndarray, rhs: np.ndarray) -> DenseSolveReport:
    """Row-pivoted dense LU solve.

    Returns the solution, the elimination growth factor max|entry| ratio,
    and a rank_deficient flag (no solution is returned in that case).
    """
    A = np.array(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"square matrix required, got {A.shape}")
    b = np.array(rhs, dtype=float)
    flat = b.ndim == 1
    if flat:
        b = b[:, None]
    if b.shape[0] != A.shape[0]:
        raise ValueError("rhs rows do not match the matrix order")
    N = A.shape[0]
    base = np.abs(A).max() if N else 0.0
    growth = 1.0
    tol = N * np.finfo(float).eps * base
    for k in range(N):
        piv = k + int(np.argmax(np.abs(A[k:, k])))
        if np.abs(A[piv, k]) <= tol:
            return DenseSolveReport(None, growth, True)
        if piv != k:
            A[[k, piv]] = A[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        A[k + 1 :, k] /= A[k, k]
        A[k + 1 :, k + 1 :] -= np.outer(A[k + 1 :, k], A[k, k + 1 :])
        if base > 0:
            growth = max(growth, np.abs(A[k:, k:]).max() / base)
    # forward then back substitution
    for k in range(N):
        b[k + 1 :] -= A[k + 1 :, k : k + 1] * b[k : k + 1]
    for k in range(N - 1, -1, -1):
        b[k] /= A[k, k]
        b[:k] -= A[:k, k : k + 1] * b[k : k + 1]
    return DenseSolveReport(b[:, 0] if flat else b, growth, False)


def max_rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    """max over entries of |a_i - b_i| / (1 + max(|a_i|, |b_i|))."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    denom = 1.0 + np.maximum(np.abs(a), np.abs(b))
    return float((np.abs(a - b) / denom).max())
