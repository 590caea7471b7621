"""Solvers for almost block diagonal (ABD) linear systems.

Implements the full family of band/block elimination methods through the
aligned and displaced module framework, with exact multiplication-count
instrumentation, Lam's alternating and local pivoting, a bordered-system
extension, and a dense reference oracle.
"""
from .core import (
    AbdSystem,
    Dims,
    abd_matvec,
    assemble_dense,
    identity_system,
    random_repeating_system,
    random_system,
    residual_norm,
    validate,
)
from .errors import (
    AbdError,
    AllZeroSegmentError,
    BorderedUnsupportedError,
    FormatError,
    InadmissiblePivotingError,
    NonFiniteError,
    ShapeMismatchError,
    SingularSystemError,
    ZeroDiagonalError,
    ZeroPivotError,
)
from .kernels import FlopLedger, TriangularFactorPair, lu_factor, mult_sub, neg_mult, tri_solve
from .methods import (
    METHOD_IDS,
    MethodDescriptor,
    SolveStats,
    common_mul,
    get_method,
    method_registry,
    predicted_mul,
    predicted_storage,
    solve,
)
from .modules import backward_step, disassemble, forward_step, head_tail_update
from .oracle import DenseSolveReport, dense_lu_solve, max_rel_diff
from .pivoting import (
    PivotLog,
    admissible,
    search_column_pivot,
    search_local_pivot,
    search_row_pivot,
)

__version__ = "1.0.0"

__all__ = [
    "AbdSystem",
    "Dims",
    "FlopLedger",
    "METHOD_IDS",
    "MethodDescriptor",
    "PivotLog",
    "SolveStats",
    "TriangularFactorPair",
    "abd_matvec",
    "admissible",
    "assemble_dense",
    "backward_step",
    "common_mul",
    "dense_lu_solve",
    "disassemble",
    "forward_step",
    "get_method",
    "head_tail_update",
    "identity_system",
    "lu_factor",
    "max_rel_diff",
    "method_registry",
    "mult_sub",
    "neg_mult",
    "predicted_mul",
    "predicted_storage",
    "random_repeating_system",
    "random_system",
    "residual_norm",
    "search_column_pivot",
    "search_local_pivot",
    "search_row_pivot",
    "solve",
    "tri_solve",
    "validate",
    "DenseSolveReport",
    "AbdError",
    "AllZeroSegmentError",
    "BorderedUnsupportedError",
    "FormatError",
    "InadmissiblePivotingError",
    "NonFiniteError",
    "ShapeMismatchError",
    "SingularSystemError",
    "ZeroDiagonalError",
    "ZeroPivotError",
]
