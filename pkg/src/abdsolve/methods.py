"""Registry of the twenty band/block elimination methods and the solve driver.

Method naming: two letter pairs give the treatment of the two pivotal
blocks, scalar (S) or block (B) combined with row (R) or column (C)
manipulation; ABTR/ABTC are the aligned block-tridiagonal wrappers (the
ABTC slot has a traditional and an efficient step sequence, registered as
ABTCt and ABTCe) and DBTR/DBTC their displaced counterparts.  Twenty method
slots, twenty-one registry entries.

Per interior module every method costs

    (p^3 - p)/3 + 2 p m n + 2 p^2 r + extra(m, n, r)

multiplications-plus-divisions, and stores

    p r + p n + entry(m, n)

locations, with square blocks reserved for scalar triangular factors.  The
``assess`` report and the conformance tests check the measured ledger
against these numbers exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import AbdSystem, Dims
from .errors import InadmissiblePivotingError
from .kernels import FlopLedger
from .modules import MethodConfig, Sweep
from .pivoting import LAM, LOCAL, NONE, PivotLog, normalize_strategy

METHOD_IDS = (
    "SRSR", "SRSC", "SCSR", "SCSC",
    "SRBR", "SCBR", "SRBC", "SCBC",
    "BRSR", "BRSC", "BCSR", "BCSC",
    "BRBR", "BCBC", "BCBR", "BRBC",
    "ABTR", "ABTCt", "ABTCe", "DBTR", "DBTC",
)


@dataclass(frozen=True)
class MethodDescriptor:
    """One elimination method: step tables, admissibility, cost model."""

    id: str
    module_kind: str
    stem_steps: tuple
    fin_steps: tuple
    head_steps: tuple
    extraneous: frozenset
    lam_admissible: bool
    local_admissible: bool
    extra_mul: Callable[[int, int, int], int]
    storage_entry: Callable[[int, int], int]
    config: MethodConfig
    bordered_ok: bool = False

    @property
    def cm_mode(self) -> str:
        return self.config.cm_mode

    @property
    def bn_mode(self) -> str:
        return self.config.bn_mode


def _mk(
    mid,
    kind,
    cm,
    bn,
    stem,
    fins,
    head,
    *,
    bt=None,
    an="raw",
    am="raw",
    dm="sharp",
    bm="raw",
    cn="raw",
    dn="raw",
    a1=None,
    headv="b",
    extraneous=(),
    lam=False,
    local=False,
    extra=None,
    storage=None,
    bordered=False,
):
    cfg = MethodConfig(
        mid=mid,
        kind=kind,
        cm_mode=cm,
        bn_mode=bn,
        bt=bt,
        an_level=an,
        am_level=am,
        dm_level=dm,
        bm_level=bm,
        cn_level=cn,
        dn_level=dn,
        a1=a1,
        head=headv,
        extraneous=frozenset(extraneous),
        bordered_ok=bordered,
    )
    return MethodDescriptor(
        id=mid,
        module_kind=kind,
        stem_steps=tuple(stem),
        fin_steps=tuple(fins),
        head_steps=tuple(head),
        extraneous=frozenset(extraneous),
        lam_admissible=lam,
        local_admissible=local,
        extra_mul=extra,
        storage_entry=storage,
        config=cfg,
        bordered_ok=bordered,
    )


def _p2mn(m, n):  # footnote a: square blocks for both triangular factors
    p = m + n
    return p * p - m * n


_SS_STEM = ("A6", "A19", "A9", "A2b", "A5")
_SS_FINS = ("A7", "A1b", "A17", "A11", "A13")
_SB_STEM = ("A6", "A9", "A19", "A2b", "A5")
_BR_STEM = ("A6", "A9", "A10", "A2c", "A5")
_BC_STEM = ("A6", "A19", "A20", "A2a", "A5")


def _build_registry():
    half = lambda x: x // 2
    regs = [
        # ---- scalar/scalar family -----------------------------------
        _mk("SRSR", "A", "SR", "SR", _SS_STEM, _SS_FINS, ("A3b", "A4b"),
            an="prime", am="prime", dm="dprime", bm="dprime", cn="prime", dn="prime",
            a1="b", headv="b", local=True, bordered=True,
            extra=lambda m, n, r: half(m * m * (m + 1) + n * n * (n - 1)),
            storage=_p2mn),
        _mk("SRSC", "A", "SR", "SC", _SS_STEM, _SS_FINS, ("A3b", "A4b"),
            an="prime", am="prime", dm="dprime", bm="dprime", cn="prime", dn="prime",
            a1="b", headv="b", local=True, bordered=True,
            extra=lambda m, n, r: half(m * m * (m + 1) + n * n * (n + 1)),
            storage=_p2mn),
        _mk("SCSR", "A", "SC", "SR", _SS_STEM, _SS_FINS, ("A3b", "A4b"),
            an="prime", am="prime", dm="dprime", bm="dprime", cn="prime", dn="prime",
            a1="b", headv="b", lam=True, local=True, bordered=True,
            extra=lambda m, n, r: half(m * m * (m - 1) + n * n * (n - 1)),
            storage=_p2mn),
        _mk("SCSC", "A", "SC", "SC", _SS_STEM, _SS_FINS, ("A3b", "A4b"),
            an="prime", am="prime", dm="dprime", bm="dprime", cn="prime", dn="prime",
            a1="b", headv="b", local=True, bordered=True,
            extra=lambda m, n, r: half(m * m * (m - 1) + n * n * (n + 1)),
            storage=_p2mn),
        # ---- scalar/block -------------------------------------------
        _mk("SRBR", "A", "SR", "BR", _SB_STEM, ("A7", "A1b", "A17", "A18"),
            ("A3a", "A4a"),
            an="prime", am="prime", dm="dprime", bm="star",
            a1="b", headv="a", local=True,
            extra=lambda m, n, r: half(m * m * (m + 1)),
            storage=_p2mn),
        _mk("SCBR", "A", "SC", "BR", _SB_STEM, ("A7", "A1b", "A17", "A18"),
            ("A3a", "A4a"),
            an="prime", am="prime", dm="dprime", bm="star",
            a1="b", headv="a", lam=True, local=True,
            extra=lambda m, n, r: half(m * m * (m - 1)),
            storage=_p2mn),
        _mk("SRBC", "A", "SR", "BC", _SB_STEM,
            ("A7", "A1b", "A11", "A13", "A12", "A14"), ("A3c", "A4c"),
            an="prime", am="prime", dm="dprime", bm="sharp", cn="ring", dn="ring",
            a1="b", headv="c",
            extra=lambda m, n, r: half(m * m * (m + 1)) + n ** 3,
            storage=lambda m, n: (m + n) * m),
        _mk("SCBC", "A", "SC", "BC", _SB_STEM,
            ("A7", "A1b", "A11", "A13", "A12", "A14"), ("A3c", "A4c"),
            an="prime", am="prime", dm="dprime", bm="sharp", cn="ring", dn="ring",
            a1="b", headv="c",
            extra=lambda m, n, r: half(m * m * (m - 1)) + n ** 3,
            storage=lambda m, n: (m + n) * m),
        # ---- block/scalar -------------------------------------------
        _mk("BRSR", "A", "BR", "SR", _BR_STEM,
            ("A7", "A8", "A1c", "A17", "A11", "A13"), ("A3b", "A4b"),
            an="ring", am="ring", dm="sharp", bm="dprime", cn="prime", dn="prime",
            a1="c", headv="b",
            extra=lambda m, n, r: m ** 3 + half(n * n * (n - 1)),
            storage=_p2mn),
        _mk("BRSC", "A", "BR", "SC", _BR_STEM,
            ("A7", "A8", "A1c", "A17", "A11", "A13"), ("A3b", "A4b"),
            an="ring", am="ring", dm="sharp", bm="dprime", cn="prime", dn="prime",
            a1="c", headv="b",
            extra=lambda m, n, r: m ** 3 + half(n * n * (n + 1)),
            storage=_p2mn),
        _mk("BCSR", "A", "BC", "SR", _BC_STEM, ("A1a", "A17", "A11", "A13"),
            ("A3b", "A4b"),
            dm="star", bm="dprime", cn="prime", dn="prime",
            a1="a", headv="b", lam=True, local=True,
            extra=lambda m, n, r: half(n * n * (n - 1)),
            storage=lambda m, n: (m + n) * n),
        _mk("BCSC", "A", "BC", "SC", _BC_STEM, ("A1a", "A17", "A11", "A13"),
            ("A3b", "A4b"),
            dm="star", bm="dprime", cn="prime", dn="prime",
            a1="a", headv="b", local=True,
            extra=lambda m, n, r: half(n * n * (n + 1)),
            storage=lambda m, n: (m + n) * n),
        # ---- block/block (reconstructed sequences) ------------------
        _mk("BRBR", "A", "BR", "BR", _BR_STEM, ("A7", "A8", "A1c", "A17", "A18"),
            ("A3a", "A4a"),
            an="ring", am="ring", dm="sharp", bm="star",
            a1="c", headv="a",
            extra=lambda m, n, r: m ** 3,
            storage=_p2mn),
        _mk("BCBC", "A", "BC", "BC", _BC_STEM,
            ("A1a", "A11", "A13", "A12", "A14"), ("A3c", "A4c"),
            dm="star", bm="sharp", cn="ring", dn="ring",
            a1="a", headv="c",
            extra=lambda m, n, r: n ** 3,
            storage=lambda m, n: m * n),
        _mk("BCBR", "A", "BC", "BR", _BC_STEM, ("A1a", "A17", "A18"),
            ("A3a", "A4a"),
            dm="star", bm="star",
            a1="a", headv="a", lam=True, local=True, bordered=True,
            extra=lambda m, n, r: 0,
            storage=lambda m, n: (m + n) * n),
        _mk("BRBC", "A", "BR", "BC", _BR_STEM,
            ("A7", "A8", "A1c", "A11", "A13", "A12", "A14"), ("A3c", "A4c"),
            an="ring", am="ring", dm="sharp", bm="sharp", cn="ring", dn="ring",
            a1="c", headv="c",
            extra=lambda m, n, r: m ** 3 + n ** 3,
            storage=lambda m, n: (m + n) * m),
        # ---- aligned block-tridiagonal ------------------------------
        _mk("ABTR", "A", "SC", "SR", _SS_STEM,
            ("A7", "A1b", "A17", "A18", "A15", "A16"), ("A3a", "A4a"),
            bt="R", an="prime", am="star", dm="dprime", bm="star",
            a1="b", headv="a", lam=True, local=True,
            extra=lambda m, n, r: (m + n) * m * m,
            storage=lambda m, n: (m + n) ** 2),
        _mk("ABTCt", "A", "SR", "SR", _SS_STEM,
            ("A11", "A13", "A12", "A14", "A25b", "A26b"), ("A29", "A30"),
            bt="C", an="prime", dm="dprime", cn="ring", dn="ring",
            headv="abtct", extraneous=("Cme", "Dme"),
            extra=lambda m, n, r: (m + n) * (half(3 * m * m + m) + n * n + m * r),
            storage=lambda m, n: (m + n) * m),
        _mk("ABTCe", "A", "BC", "BC", _BC_STEM,
            ("A11", "A13", "A12", "A14", "A25a", "A26a"), ("A1a", "A3c", "A4c"),
            bt="C", dm="star", cn="ring", dn="ring",
            headv="abtce", extraneous=("Cme", "Dme"),
            extra=lambda m, n, r: (m + n) * m * n + n ** 3 + (m + n) * m * r,
            storage=lambda m, n: (m + n) * m),
        # ---- displaced block-tridiagonal ----------------------------
        _mk("DBTR", "D", "BR", "BR", ("A5", "A17", "A18", "A3a", "A6"),
            ("A9", "A7", "A10", "A8"), ("A4a", "A2c", "A1c"),
            bt="R", an="ring", am="ring", dm="sharp", bm="star",
            headv="dbtr", extraneous=("Bne", "Bme"),
            # m^3 + (p + n) m r
            extra=lambda m, n, r: m ** 3 + (m + 2 * n) * m * r,
            storage=lambda m, n: (m + n) ** 2),
        _mk("DBTC", "D", "SC", "SR", ("A5", "A11", "A17", "A3b", "A6"),
            ("A13", "A4b", "A19", "A20", "A21", "A22"), ("A2a", "A1a"),
            bt="C", dm="star", bm="dprime", cn="prime", dn="star",
            headv="dbtc", lam=True, local=True,
            extra=lambda m, n, r: (m + n) * n * n,
            storage=lambda m, n: 0),
    ]
    return {d.id: d for d in regs}


_REGISTRY = _build_registry()


def method_registry() -> list[MethodDescriptor]:
    """All descriptors, in the fixed method order."""
    return [_REGISTRY[mid] for mid in METHOD_IDS]


def get_method(method) -> MethodDescriptor:
    if isinstance(method, MethodDescriptor):
        return method
    try:
        return _REGISTRY[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; known: {', '.join(METHOD_IDS)}")


def common_mul(dims: Dims) -> int:
    """Per-module cost shared by every method."""
    m, n, p, r = dims.m, dims.n, dims.p, dims.r
    return (p ** 3 - p) // 3 + 2 * p * m * n + 2 * p * p * r


def predicted_mul(method, dims: Dims) -> tuple[int, int]:
    """(per full interior module, whole system) multiplication counts.

    The per-module value is the assessment-table figure.  The total adds the
    reduced end adjustments: every aligned sweep ends with a stem-only
    module, the displaced sweeps with their three end forms.
    """
    desc = get_method(method)
    m, n, p, J, r = dims.m, dims.n, dims.p, dims.J, dims.r
    per = common_mul(dims) + desc.extra_mul(m, n, r)
    if desc.module_kind == "A":
        total = (J - 1) * per + (p ** 3 - p) // 3 + p * p * r
    else:
        ends = (
            (m ** 3 - m) // 3
            + (n ** 3 - n) // 3
            + p * m * n
            + p * m * r
            + m * n * r
            + n * n * r
        )
        if desc.id == "DBTR":
            ends -= m * m * r
        total = (J - 1) * per + ends
    return per, total


def predicted_storage(method, dims: Dims) -> int:
    """Locations per module: p r + p n + the method's table entry.

    Footnote substitutions apply: methods that factor a pivotal block by
    scalar elimination reserve the full square for its triangular factors.
    """
    desc = get_method(method)
    m, n, p, r = dims.m, dims.n, dims.p, dims.r
    return p * r + p * n + desc.storage_entry(m, n)


@dataclass
class SolveStats:
    """Instrumentation of one solve."""

    method: str
    pivoting: str
    mul_total: int
    mul_per_module: list
    mul_interior_module: int | None
    predicted_mul_per_module: int
    predicted_mul_total: int
    storage_locs: int
    pivot_count: int
    max_multiplier: float


def make_sweep(system: AbdSystem, method, pivoting: str = NONE) -> Sweep:
    """A bound sweep for step-by-step use (forward_step / backward_step)."""
    desc = get_method(method)
    strategy = normalize_strategy(pivoting)
    if strategy in (LAM, LOCAL):
        ok = desc.lam_admissible if strategy == LAM else desc.local_admissible
        if not ok:
            raise InadmissiblePivotingError(desc.id, strategy)
    return Sweep(system, desc.config, strategy)


def solve(system: AbdSystem, method, pivoting: str = NONE):
    """Solve an ABD system with one elimination method.

    Returns (solution, stats); the solution is a (J*p, r) array in the grid
    ordering.  Works on a copy; the input system is untouched.  Raises
    InadmissiblePivotingError for a strategy the method does not admit and
    SingularSystemError / ZeroPivotError when elimination breaks down.
    """
    desc = get_method(method)
    sweep = make_sweep(system, desc, pivoting)
    sweep.run_forward()
    sweep.run_backward()
    per_module = [f + b for f, b in zip(sweep.fwd_mul, sweep.bwd_mul)]
    iu = sweep.interior_unit()
    per, total = predicted_mul(desc, system.dims)
    stats = SolveStats(
        method=desc.id,
        pivoting=sweep.strategy,
        mul_total=sweep.ledger.mul,
        mul_per_module=per_module,
        mul_interior_module=per_module[iu] if iu is not None else None,
        predicted_mul_per_module=per,
        predicted_mul_total=total,
        storage_locs=predicted_storage(desc, system.dims),
        pivot_count=len(sweep.plog),
        max_multiplier=sweep.max_multiplier,
    )
    return sweep.solution(), stats
