"""Block-structured storage of almost block diagonal (ABD) systems.

An ABD system couples J grid points, each carrying p = m + n unknowns per
right-hand-side column.  The coefficient matrix consists of an m-by-p top
block, J-1 interior p-by-2p blocks and an n-by-p bottom block; within each
interior block the n-row band sits above the m-row band.  Blocks are plain
float64 ndarrays in row-major order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteError, ShapeMismatchError


@dataclass(frozen=True)
class Dims:
    """Problem dimensions.

    m, n   rows of the side-condition blocks (m at grid point 1, n at J)
    J      number of grid points, at least 2
    r      number of right-hand-side columns
    """

    m: int
    n: int
    J: int
    r: int = 1

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"m and n must be >= 1, got m={self.m} n={self.n}")
        if self.J < 2:
            raise ValueError(f"J must be >= 2, got {self.J}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")

    @property
    def p(self) -> int:
        return self.m + self.n

    @property
    def n_unknowns(self) -> int:
        return self.J * self.p


@dataclass
class AbdSystem:
    """An ABD coefficient matrix plus right-hand sides.

    top       (m, p) block [Cm1 Dm1]
    interior  (J-1, p, 2p) stack; block j holds the n-row band
              [An_j Bn_j Cn_{j+1} Dn_{j+1}] above the m-row band
              [Am_j Bm_j Cm_{j+1} Dm_{j+1}]
    bottom    (n, p) block [An_J Bn_J]
    rhs       (J*p, r), rows in the dense ordering of the figure
    """

    dims: Dims
    top: np.ndarray
    interior: np.ndarray
    bottom: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.top = np.ascontiguousarray(self.top, dtype=float)
        self.interior = np.ascontiguousarray(self.interior, dtype=float)
        self.bottom = np.ascontiguousarray(self.bottom, dtype=float)
        self.rhs = np.ascontiguousarray(self.rhs, dtype=float)

    def copy(self) -> "AbdSystem":
        return AbdSystem(
            self.dims,
            self.top.copy(),
            self.interior.copy(),
            self.bottom.copy(),
            self.rhs.copy(),
        )


def validate(system: AbdSystem) -> None:
    """Check every block shape against the dimensions and reject non-finite data.

    Raises :class:`ShapeMismatchError` naming the first offending block, or
    :class:`NonFiniteError`.
    """
    d = system.dims
    p = d.p
    checks = [
        ("top", system.top, (d.m, p)),
        ("interior", system.interior, (d.J - 1, p, 2 * p)),
        ("bottom", system.bottom, (d.n, p)),
        ("rhs", system.rhs, (d.J * p, d.r)),
    ]
    for name, arr, want in checks:
        if arr.shape != want:
            raise ShapeMismatchError(name, want, arr.shape)
    for name, arr, _ in checks:
        if not np.isfinite(arr).all():
            raise NonFiniteError(name)


def assemble_dense(system: AbdSystem) -> np.ndarray:
    """Assemble the full J*p square matrix; blanks are exact zeros."""
    validate(system)
    d = system.dims
    m, n, p, J = d.m, d.n, d.p, d.J
    N = J * p
    G = np.zeros((N, N))
    G[:m, :p] = system.top
    for j in range(J - 1):
        r0 = m + j * p
        c0 = j * p
        G[r0 : r0 + p, c0 : c0 + 2 * p] = system.interior[j]
    G[N - n :, N - p :] = system.bottom
    return G


def abd_matvec(system: AbdSystem, z: np.ndarray) -> np.ndarray:
    """G @ z without assembling G."""
    d = system.dims
    m, n, p, J = d.m, d.n, d.p, d.J
    z = np.asarray(z, dtype=float)
    flat = z.ndim == 1
    if flat:
        z = z[:, None]
    out = np.zeros((J * p, z.shape[1]))
    out[:m] = system.top @ z[:p]
    for j in range(J - 1):
        r0 = m + j * p
        out[r0 : r0 + p] = system.interior[j] @ z[j * p : (j + 2) * p]
    out[J * p - n :] = system.bottom @ z[(J - 1) * p :]
    return out[:, 0] if flat else out


def identity_system(dims: Dims, rhs: np.ndarray | None = None) -> AbdSystem:
    """The ABD system whose dense assembly is the identity matrix."""
    m, n, p, J = dims.m, dims.n, dims.p, dims.J
    top = np.zeros((m, p))
    top[:, :m] = np.eye(m)
    inter = np.zeros((J - 1, p, 2 * p))
    inter[:, :n, m : m + n] = np.eye(n)  # Bn_j = I on the n-band
    inter[:, n:, p : p + m] = np.eye(m)  # Cm_{j+1} = I on the m-band
    bottom = np.zeros((n, p))
    bottom[:, m:] = np.eye(n)
    if rhs is None:
        rhs = np.zeros((dims.n_unknowns, dims.r))
    return AbdSystem(dims, top, inter, bottom, np.array(rhs, dtype=float))


def random_system(
    dims: Dims, seed: int, conditioning: float | None = None
) -> tuple[AbdSystem, np.ndarray]:
    """Deterministic random system with a known solution.

    Entries are uniform in [-1, 1]; ``conditioning`` (default p + 1) is added
    to the dense-diagonal positions so unpivoted elimination is usually safe.
    The right-hand side is computed as G @ z_true, and (system, z_true) is
    returned.  Equal seeds give byte-identical systems.
    """
    if conditioning is None:
        conditioning = float(dims.p + 1)
    if conditioning < 0:
        raise ValueError("conditioning boost must be >= 0")
    m, n, p, J = dims.m, dims.n, dims.p, dims.J
    rng = np.random.default_rng(seed)
    top = rng.uniform(-1.0, 1.0, (m, p))
    inter = rng.uniform(-1.0, 1.0, (J - 1, p, 2 * p))
    bottom = rng.uniform(-1.0, 1.0, (n, p))
    # dense diagonal: top rows hit columns 0..m; interior row t hits local
    # column m + t; bottom row t likewise
    top[:, :m] += conditioning * np.eye(m)
    for t in range(p):
        inter[:, t, m + t] += conditioning
    for t in range(n):
        bottom[t, m + t] += conditioning
    z_true = rng.uniform(-1.0, 1.0, (dims.n_unknowns, dims.r))
    system = AbdSystem(dims, top, inter, bottom, np.zeros((dims.n_unknowns, dims.r)))
    system.rhs = abd_matvec(system, z_true)
    return system, z_true


def random_repeating_system(
    dims: Dims, seed: int, conditioning: float | None = None
) -> tuple[AbdSystem, np.ndarray]:
    """Like :func:`random_system` but with one interior block replicated.

    The reference solution repeats per grid point, so the interior
    right-hand-side rows repeat as well; this is exactly the shape the
    reference text format can represent, and ``gen`` uses it.
    """
    if conditioning is None:
        conditioning = float(dims.p + 1)
    m, n, p, J = dims.m, dims.n, dims.p, dims.J
    rng = np.random.default_rng(seed)
    top = rng.uniform(-1.0, 1.0, (m, p))
    block = rng.uniform(-1.0, 1.0, (p, 2 * p))
    bottom = rng.uniform(-1.0, 1.0, (n, p))
    top[:, :m] += conditioning * np.eye(m)
    for t in range(p):
        block[t, m + t] += conditioning
    for t in range(n):
        bottom[t, m + t] += conditioning
    inter = np.repeat(block[None, :, :], J - 1, axis=0)
    z_true = np.tile(rng.uniform(-1.0, 1.0, (p, dims.r)), (J, 1))
    system = AbdSystem(dims, top, inter, bottom, np.zeros((dims.n_unknowns, dims.r)))
    system.rhs = abd_matvec(system, z_true)
    return system, z_true


def residual_norm(system: AbdSystem, sol: np.ndarray) -> float:
    """max over RHS columns of ||G z - g||_inf / (||G||_inf ||z||_inf + ||g||_inf)."""
    sol = np.asarray(sol, dtype=float)
    if sol.ndim == 1:
        sol = sol[:, None]
    if sol.shape != system.rhs.shape:
        raise ShapeMismatchError("solution", system.rhs.shape, sol.shape)
    G = assemble_dense(system)
    gnorm = np.abs(G).sum(axis=1).max()
    worst = 0.0
    for c in range(sol.shape[1]):
        res = np.abs(G @ sol[:, c] - system.rhs[:, c]).max()
        denom = gnorm * np.abs(sol[:, c]).max() + np.abs(system.rhs[:, c]).max()
        worst = max(worst, res / denom if denom > 0 else res)
    return worst
