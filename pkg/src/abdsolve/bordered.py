"""Bordered (BABD) extension: right border of q columns, lower border of k rows.

The border columns ride the forward sweep like extra right-hand sides, the
border rows join the fins of every aligned module, and the hidden segment
[Hk# gk#] accumulates their head-tail contributions.  After the last module
the remaining (n+k)-by-(n+q) corner is finished by a dense full-pivot
factorization, which needs k == q.  Methods that do not introduce
extraneous elements spend 2 p^2 q + p q^2 + 2 p q r extra multiplications
per module on the borders, and p q extra locations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AbdSystem, Dims, abd_matvec, assemble_dense, validate
from .errors import BorderedUnsupportedError, ShapeMismatchError
from .methods import SolveStats, get_method, predicted_mul, predicted_storage
from .modules import Sweep
from .pivoting import LAM, LOCAL, NONE, normalize_strategy
from .errors import InadmissiblePivotingError


@dataclass
class BorderedSystem:
    """An ABD core plus border blocks.

    hm, hn    per-point right-border blocks, shaped (J, m, q) and (J, n, q)
    hk        corner block (k, q)
    ak, bk    per-point lower-border blocks, shaped (J, k, m) and (J, k, n)
    gk        border right-hand sides (k, r)
    """

    core: AbdSystem
    hm: np.ndarray
    hn: np.ndarray
    hk: np.ndarray
    ak: np.ndarray
    bk: np.ndarray
    gk: np.ndarray

    def __post_init__(self):
        d = self.core.dims
        for name in ("hm", "hn", "hk", "ak", "bk", "gk"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name), dtype=float))
        q = self.hm.shape[2] if self.hm.ndim == 3 else 0
        k = self.ak.shape[1] if self.ak.ndim == 3 else 0
        checks = [
            ("hm", self.hm, (d.J, d.m, q)),
            ("hn", self.hn, (d.J, d.n, q)),
            ("hk", self.hk, (k, q)),
            ("ak", self.ak, (d.J, k, d.m)),
            ("bk", self.bk, (d.J, k, d.n)),
            ("gk", self.gk, (k, d.r)),
        ]
        for name, arr, want in checks:
            if arr.shape != want:
                raise ShapeMismatchError(name, want, arr.shape)
        if k > d.n + q:
            raise ValueError(f"k={k} exceeds the solvability bound n+q={d.n + q}")
        self.q = q
        self.k = k

    def h_rows(self) -> np.ndarray:
        """The border columns as one (J*p, q) strip in the grid row order."""
        d = self.core.dims
        out = np.zeros((d.n_unknowns, self.q))
        for j in range(d.J):
            r0 = j * d.p
            out[r0 : r0 + d.m] = self.hm[j]
            out[r0 + d.m : r0 + d.p] = self.hn[j]
        return out

    def border_strip(self) -> np.ndarray:
        """The border rows as one (k, J*p) strip."""
        d = self.core.dims
        out = np.zeros((self.k, d.n_unknowns))
        for j in range(d.J):
            c0 = j * d.p
            out[:, c0 : c0 + d.m] = self.ak[j]
            out[:, c0 + d.m : c0 + d.p] = self.bk[j]
        return out


def assemble_dense_bordered(bsys: BorderedSystem) -> tuple[np.ndarray, np.ndarray]:
    """(matrix, rhs) of the full bordered system, border unknowns last."""
    core = bsys.core
    d = core.dims
    N = d.n_unknowns
    G = assemble_dense(core)
    q, k = bsys.q, bsys.k
    full = np.zeros((N + k, N + q))
    full[:N, :N] = G
    # the grid rows of the dense layout are the module row ordering; the H
    # strip is indexed by grid, so place it per grid point
    h = bsys.h_rows()
    for j in range(d.J):
        full[_grid_dense_rows(d, j), N:] = h[j * d.p : (j + 1) * d.p]
    full[N:, :N] = bsys.border_strip()
    full[N:, N:] = bsys.hk
    rhs = np.vstack([core.rhs, bsys.gk])
    return full, rhs


def _grid_dense_rows(d: Dims, j: int) -> np.ndarray:
    """Dense row indices that carry grid point j's H blocks.

    Row j's Hm block sits with the zm_j equations (the tail rows) and Hn
    with the zn_j equations, matching the figure's row ordering.
    """
    m, n, p, J = d.m, d.n, d.p, d.J
    if j == 0:
        hm = np.arange(0, m)
    else:
        hm = np.arange(m + (j - 1) * p + n, m + j * p)
    if j < J - 1:
        hn = np.arange(m + j * p, m + j * p + n)
    else:
        hn = np.arange(J * p - n, J * p)
    return np.concatenate([hm, hn])


def bordered_h_dense_rows(bsys: BorderedSystem) -> np.ndarray:
    """H strip reordered to the module (solver) row layout."""
    d = bsys.core.dims
    h = bsys.h_rows()
    out = np.zeros_like(h)
    for j in range(d.J):
        out[_grid_dense_rows(d, j)] = h[j * d.p : (j + 1) * d.p]
    return out


def bordered_predicted_mul(dims: Dims, q: int, k: int):
    """Extra border multiplications per module: 2 p^2 q + p q^2 + 2 p q r.

    Stated for k == q only; returns None (not covered) otherwise.  The
    border storage addition is p*q locations.
    """
    if k != q:
        return None
    p, r = dims.p, dims.r
    return 2 * p * p * q + p * q * q + 2 * p * q * r


def solve_bordered(bsys: BorderedSystem, method, pivoting: str = NONE):
    """Solve a bordered system; the q border unknowns come last.

    Needs k == q for a square system.  Supported methods are the
    scalar/scalar family plus BCBR; with q = k = 0 the path is identical to
    the plain solver.
    """
    desc = get_method(method)
    if not desc.bordered_ok:
        raise BorderedUnsupportedError(desc.id)
    if bsys.k != bsys.q:
        raise ValueError("solve_bordered requires k == q")
    strategy = normalize_strategy(pivoting)
    if strategy in (LAM, LOCAL):
        ok = desc.lam_admissible if strategy == LAM else desc.local_admissible
        if not ok:
            raise InadmissiblePivotingError(desc.id, strategy)
    validate(bsys.core)
    sweep = Sweep(bsys.core, desc.config, strategy)
    if bsys.q or bsys.k:
        sweep.attach_border(
            bordered_h_dense_rows(bsys), bsys.hk, bsys.border_strip(), bsys.gk
        )
    sweep.run_forward()
    sweep.run_backward()
    per_module = [f + b for f, b in zip(sweep.fwd_mul, sweep.bwd_mul)]
    iu = sweep.interior_unit()
    per, total = predicted_mul(desc, bsys.core.dims)
    stats = SolveStats(
        method=desc.id,
        pivoting=strategy,
        mul_total=sweep.ledger.mul,
        mul_per_module=per_module,
        mul_interior_module=per_module[iu] if iu is not None else None,
        predicted_mul_per_module=per,
        predicted_mul_total=total,
        storage_locs=predicted_storage(desc, bsys.core.dims) + bsys.core.dims.p * bsys.q,
        pivot_count=len(sweep.plog),
        max_multiplier=sweep.max_multiplier,
    )
    return sweep.solution(), stats


def random_bordered_system(
    dims: Dims, q: int, k: int, seed: int, conditioning: float | None = None
) -> tuple[BorderedSystem, np.ndarray]:
    """Random bordered system with a known solution (grid unknowns then border)."""
    from .core import random_system

    if conditioning is None:
        conditioning = float(dims.p + 1 + q)
    core, _ = random_system(dims, seed, conditioning)
    rng = np.random.default_rng(seed + 104729)
    J, m, n, r = dims.J, dims.m, dims.n, dims.r
    hm = rng.uniform(-1.0, 1.0, (J, m, q))
    hn = rng.uniform(-1.0, 1.0, (J, n, q))
    hk = rng.uniform(-1.0, 1.0, (k, q)) + conditioning * np.eye(k, q)
    ak = rng.uniform(-1.0, 1.0, (J, k, m))
    bk = rng.uniform(-1.0, 1.0, (J, k, n))
    gk = np.zeros((k, r))
    bsys = BorderedSystem(core, hm, hn, hk, ak, bk, gk)
    z_true = rng.uniform(-1.0, 1.0, (dims.n_unknowns + q, r))
    full, _ = assemble_dense_bordered(bsys)
    rhs_full = full @ z_true
    core.rhs = rhs_full[: dims.n_unknowns]
    bsys.gk = rhs_full[dims.n_unknowns :]
    return bsys, z_true
