"""Pivot selection strategies and permutation logging.

Strategies:

none      no interchanges; an exact zero pivot aborts.
row       row interchanges only, within segments that share a sparsity
          pattern (the tail rows for the first pivotal block, the full
          column segment for the second).
column    column interchanges only, mirror of ``row``.
lam_alternating
          Lam's strategy: column pivoting over the tail segment
          [Cm# Dm#] paired with row pivoting over the column segment
          [Bn#; Bm#].  Guarantees validity for nonsingular systems and,
          with correspondingly alternating elimination, multipliers
          bounded by unity.
local     full (maximum) pivoting restricted to the same two segments;
          needs both row and column interchanges.

Searches use the first index attaining the maximum absolute value
(strict-inequality update); local scans its rectangle column-major.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllZeroSegmentError

NONE = "none"
ROW = "row"
COLUMN = "column"
LAM = "lam_alternating"
LOCAL = "local"

STRATEGIES = (NONE, ROW, COLUMN, LAM, LOCAL)

_ALIASES = {"lam": LAM, "lams": LAM, "lam_alternating": LAM}


def normalize_strategy(name: str) -> str:
    name = name.strip().lower()
    name = _ALIASES.get(name, name)
    if name not in STRATEGIES:
        raise ValueError(f"unknown pivoting strategy {name!r}")
    return name


def search_column_pivot(values) -> int:
    """Index of the first maximal |value| across candidate columns."""
    values = np.abs(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("empty pivot segment")
    if not values.any():
        raise AllZeroSegmentError()
    return int(np.argmax(values))


def search_row_pivot(values) -> int:
    """Index of the first maximal |value| across candidate rows."""
    return search_column_pivot(values)


def search_local_pivot(segment) -> tuple[int, int]:
    """(row, col) of the first maximal |value|, scanning column-major."""
    segment = np.abs(np.asarray(segment, dtype=float))
    if segment.size == 0:
        raise ValueError("empty pivot segment")
    if not segment.any():
        raise AllZeroSegmentError()
    rows = segment.shape[0]
    flat = int(np.argmax(segment.ravel(order="F")))
    return flat % rows, flat // rows


@dataclass
class PivotLog:
    """Ordered interchange records for one solve.

    Each record is (step, kind, a, b) with kind "row" or "col" and a, b
    global indices.  Only genuine interchanges (a != b) are recorded, so the
    record count equals the interchange count.
    """

    records: list = field(default_factory=list)
    _step: int = 0

    def advance(self) -> None:
        self._step += 1

    def record(self, kind: str, a: int, b: int) -> None:
        if a != b:
            self.records.append((self._step, kind, a, b))

    def __len__(self) -> int:
        return len(self.records)

    def apply(self, order: np.ndarray, kind: str) -> np.ndarray:
        """Apply the recorded interchanges of one kind to an index array."""
        out = np.array(order)
        for _, k, a, b in self.records:
            if k == kind:
                out[[a, b]] = out[[b, a]]
        return out

    def apply_inverse(self, order: np.ndarray, kind: str) -> np.ndarray:
        out = np.array(order)
        for _, k, a, b in reversed(self.records):
            if k == kind:
                out[[a, b]] = out[[b, a]]
        return out


def admissible(method, strategy: str) -> bool:
    """Whether the pivoting strategy is admissible for the method.

    ``none``, ``row`` and ``column`` are always mechanically admissible.
    Lam's and local pivoting follow the assessment table: Lam's needs
    correspondingly alternating elimination, local additionally needs the
    method to inflect Dm to at least Dm'' and Bm to at least Bm''.
    """
    from .methods import get_method  # deferred: avoids an import cycle

    strategy = normalize_strategy(strategy)
    desc = get_method(method)
    if strategy in (NONE, ROW, COLUMN):
        return True
    if strategy == LAM:
        return desc.lam_admissible
    return desc.local_admissible
