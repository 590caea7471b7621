"""Module framework: aligned (A) and displaced (D) module sweeps.

A solve disassembles the ABD system into an ordered sequence of modules.
Each module has a p-by-p stem, two fins, and a head that overlaps the next
module's tail.  The forward sweep factors the stem, processes the fins and
subtracts the head from the successor's raw blocks (the head-tail relation,
applied streaming); the backward sweep contracts the stored right parts and
solves for the module unknowns.

The two pivotal eliminations of every method are fused loops over a panel:

* first pivotal block (Cm#-type): a wide m-by-p panel holding the block and
  optionally the Dm companion columns, eliminated with m pivots;
* second pivotal block (Bn#-type): a tall p-by-n panel holding the block and
  the multiplier rows beneath it, eliminated with n pivots.

Fusing keeps the companion zones current, so Lam's and local pivot searches
see the same values the reference band codes see and every divided entry
(the multipliers) can be tracked for the stability bound.  Everything else
(fin chains, Schur products, right parts) runs through the exact-count
kernels afterwards; the ledger totals decompose exactly into the published
per-equation counts either way.

Column interchanges swap whole matrix columns wherever they appear, so all
stored factors live in one final column labeling and a single scatter at the
end restores the original unknown order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AbdSystem, validate
from .errors import SingularSystemError, ZeroPivotError
from .kernels import (
    FlopLedger,
    fixed_matmul,
    lu_cost,
    matmul_cost,
    mult_add,
    mult_sub,
    neg_mult,
    solve_packed,
    trisolve_cost,
)
from .pivoting import (
    COLUMN,
    LAM,
    LOCAL,
    NONE,
    ROW,
    PivotLog,
    search_column_pivot,
    search_local_pivot,
    search_row_pivot,
)

_EPS64 = float(np.finfo(float).eps)


@dataclass(frozen=True)
class MethodConfig:
    """Engine-facing description of one elimination method.

    ``cm_mode``/``bn_mode`` say how each pivotal block is factored: scalar
    row "SR", scalar column "SC", block row "BR", block column "BC".  ``bt``
    marks the identity-decomposition wrappers: "R" keeps the whole stem in
    the right factor (applied in the backward sweep), "C" in the left factor
    (applied forward).  The level fields record how far each block family is
    inflected; they drive the lazy chains and say which views the right
    parts multiply against.
    """

    mid: str
    kind: str  # "A" | "D"
    cm_mode: str
    bn_mode: str
    bt: str | None = None
    an_level: str = "raw"  # raw | prime | ring
    am_level: str = "raw"  # raw | prime | ring | star
    dm_level: str = "sharp"  # sharp | dprime | star
    bm_level: str = "raw"  # raw | sharp | dprime | star
    cn_level: str = "raw"  # raw | prime | ring
    dn_level: str = "raw"  # raw | prime | ring | star
    a1: str | None = None  # A1 variant forming Bm#; None keeps Bm raw
    head: str = "b"  # a | b | c | abtct | abtce | dbtr | dbtc
    extraneous: frozenset = frozenset()
    bordered_ok: bool = False

    @property
    def cm_rowcol(self) -> str:
        return "row" if self.cm_mode in ("SR", "BR") else "col"

    @property
    def bn_rowcol(self) -> str:
        return "row" if self.bn_mode in ("SR", "BR") else "col"

    def _parts(self, mode: str, rowcol: str):
        lower = ("L", rowcol == "row")
        upper = ("U", rowcol == "col")
        if mode in ("SR", "SC"):
            return [lower], [upper]
        if mode == "BR":
            return [], [lower, upper]
        return [lower, upper], []  # BC

    @property
    def cm_parts(self):
        """(mu, nu) triangle lists for the Cm factor."""
        return self._parts(self.cm_mode, self.cm_rowcol)

    @property
    def bn_parts(self):
        return self._parts(self.bn_mode, self.bn_rowcol)


def head_tail_update(head: np.ndarray, raw: np.ndarray) -> np.ndarray:
    """Tail of the next module: raw blocks minus the predecessor's head.

    Pure subtraction per the head-tail relation; involves no multiplications
    and therefore takes no ledger.
    """
    if head.shape != raw.shape:
        raise ValueError(f"head {head.shape} vs raw {raw.shape}")
    return raw - head


class ModuleState:
    """One module of a sweep: a window into the working storage.

    ``index`` is 1-based like the module subscripts of the framework;
    ``truncated`` is None for full modules, else the end form.  The snapshot
    methods assemble copies of the current stem, fins and tail; elimination
    itself works in place on the underlying views.
    """

    def __init__(self, sweep: "Sweep", unit: int):
        self.sweep = sweep
        self.unit = unit
        self.kind, self.index, self.truncated = sweep.unit_tags[unit]

    def stem(self) -> np.ndarray:
        s = self.sweep
        if self.kind == "A":
            if self.truncated == "trailing":
                return np.vstack([s.a_tail(s.J - 1), s.bot])
            a = self.index - 1
            return np.vstack([s.a_tail(a), s.inter[a][: s.n, : s.p]])
        d = self.index - 1
        return s.inter[d][:, s.m : s.p + s.m].copy()

    def fin_psi(self) -> np.ndarray:
        s = self.sweep
        if self.kind == "A":
            a = self.index - 1
            return s.inter[a][s.n :, : s.p].copy()
        d = self.index - 1
        rows = s.p if self.truncated is None else s.n
        psi = np.zeros((rows, s.p))
        if self.truncated is None:
            psi[:, s.n :] = s.inter[d + 1][:, : s.m]
        else:
            psi[:, s.n :] = s.bot[:, : s.m]
        return psi

    def fin_phi_plus(self) -> np.ndarray:
        s = self.sweep
        if self.kind == "A":
            a = self.index - 1
            phi = np.zeros((s.p, s.p))
            phi[s.m :, :] = s.inter[a][: s.n, s.p :]
            rho = np.vstack([s.rhs[s.a_tail_rows(a)], s.rhs[s.band_rows(a)][: s.n]])
            return np.hstack([phi, rho])
        d = self.index - 1
        return np.hstack([s.inter[d][:, s.p + s.m :], s.rhs[s.band_rows(d)]])

    def tail_plus(self) -> np.ndarray:
        s = self.sweep
        if self.kind == "A":
            a = self.index - 1 if self.truncated is None else s.J - 1
            return np.hstack([s.a_tail(a), s.rhs[s.a_tail_rows(a)]])
        d = self.index - 1
        return np.hstack([s.inter[d][:, s.m : s.p], s.rhs[s.band_rows(d)]])


@dataclass
class TruncatedEnd:
    """A reduced end module (minor adjustment at either end)."""

    kind: str
    which: str
    state: ModuleState | None


@dataclass
class Decomposition:
    modules: list
    leading: TruncatedEnd
    trailing: list
    sweep: "Sweep"


class Sweep:
    """Working copy of a system plus all per-solve state.

    Owns the ledger, the pivot log, the column permutation and the
    per-module scratch.  One sweep serves exactly one solve.
    """

    def __init__(
        self,
        system: AbdSystem,
        cfg: MethodConfig,
        strategy: str = NONE,
        ledger: FlopLedger | None = None,
        plog: PivotLog | None = None,
    ):
        validate(system)
        d = system.dims
        self.dims = d
        self.m, self.n, self.p, self.J, self.r = d.m, d.n, d.p, d.J, d.r
        self.top = system.top.copy()
        self.inter = system.interior.copy()
        self.bot = system.bottom.copy()
        self.rhs = system.rhs.copy()
        self.cfg = cfg
        self.strategy = strategy
        self.ledger = ledger if ledger is not None else FlopLedger()
        self.plog = plog if plog is not None else PivotLog()
        self.colperm = np.arange(d.n_unknowns)
        self.max_multiplier = 0.0
        self.fwd_mul: list[int] = []
        self.bwd_mul: list[int] = []
        self.phi_ext: dict[int, np.ndarray] = {}
        # bordered extension; zero-size when absent
        self.q = 0
        self.kb = 0
        self.h = np.zeros((d.n_unknowns, 0))
        self.hk = np.zeros((0, 0))
        self.bstrip = np.zeros((0, d.n_unknowns))
        self.gk = np.zeros((0, d.r))
        self.zH = np.zeros((0, d.r))
        self._build_units()

    def attach_border(self, h, hk, bstrip, gk) -> None:
        self.h = np.array(h, dtype=float)
        self.hk = np.array(hk, dtype=float)
        self.bstrip = np.array(bstrip, dtype=float)
        self.gk = np.array(gk, dtype=float)
        self.q = self.h.shape[1]
        self.kb = self.bstrip.shape[0]

    # ------------------------------------------------------------------
    def _build_units(self) -> None:
        J = self.J
        if self.cfg.kind == "A":
            self.unit_tags = [("A", j, None) for j in range(1, J)]
            self.unit_tags.append(("A", J, "trailing"))
        else:
            self.unit_tags = [("D", 0, "leading")]
            self.unit_tags += [("D", j, None) for j in range(1, J - 1)]
            self.unit_tags.append(("D", J - 1, "penultimate"))
            self.unit_tags.append(("D", J, "trailing"))

    def modules(self) -> list:
        return [ModuleState(self, u) for u in range(len(self.unit_tags))]

    def interior_unit(self) -> int | None:
        """Index of the first full interior module, if one exists."""
        if self.cfg.kind == "A":
            return 0
        return 1 if self.J >= 3 else None

    # ------------------------------------------------------------------
    # storage geometry
    def band_rows(self, b: int) -> slice:
        r0 = self.m + b * self.p
        return slice(r0, r0 + self.p)

    def bot_rows(self) -> slice:
        return slice(self.dims.n_unknowns - self.n, self.dims.n_unknowns)

    def a_tail(self, a: int) -> np.ndarray:
        """Tail block [Cm# Dm#] of aligned module a (0-based)."""
        if a == 0:
            return self.top
        return self.inter[a - 1][self.n :, self.p :]

    def a_tail_rows(self, a: int) -> slice:
        if a == 0:
            return slice(0, self.m)
        r0 = self.m + (a - 1) * self.p + self.n
        return slice(r0, r0 + self.m)

    # ------------------------------------------------------------------
    # interchanges
    def _locate_row(self, g: int):
        m, p, J = self.m, self.p, self.J
        if g < m:
            return "top", self.top, g
        if g < m + (J - 1) * p:
            b, rr = divmod(g - m, p)
            return ("inter", b), self.inter[b], rr
        return "bot", self.bot, g - (m + (J - 1) * p)

    def swap_rows(self, ga: int, gb: int) -> None:
        if ga == gb:
            return
        tag_a, arr_a, ia = self._locate_row(ga)
        tag_b, arr_b, ib = self._locate_row(gb)
        if tag_a != tag_b:
            raise AssertionError("row interchange across storage regions")
        arr_a[[ia, ib]] = arr_a[[ib, ia]]
        self.rhs[[ga, gb]] = self.rhs[[gb, ga]]
        if self.q:
            self.h[[ga, gb]] = self.h[[gb, ga]]
        self.plog.record("row", ga, gb)

    def swap_grid_cols(self, g: int, a: int, b: int) -> None:
        """Swap positions a and b within grid point g's column group.

        Touches every storage location of the two global columns, so stored
        factors stay coherent in the final labeling.
        """
        if a == b:
            return
        p, J = self.p, self.J
        if g == 0:
            self.top[:, [a, b]] = self.top[:, [b, a]]
        else:
            self.inter[g - 1][:, [p + a, p + b]] = self.inter[g - 1][:, [p + b, p + a]]
        if g <= J - 2:
            self.inter[g][:, [a, b]] = self.inter[g][:, [b, a]]
        if g == J - 1:
            self.bot[:, [a, b]] = self.bot[:, [b, a]]
        ga, gb = g * p + a, g * p + b
        if self.kb:
            self.bstrip[:, [ga, gb]] = self.bstrip[:, [gb, ga]]
        self.colperm[[ga, gb]] = self.colperm[[gb, ga]]
        self.plog.record("col", ga, gb)

    # ------------------------------------------------------------------
    # the fused pivoted elimination
    def _elim_panel(
        self,
        panel: np.ndarray,
        k: int,
        rowcol: str,
        *,
        module,
        lam_kind: str,
        search_rows: int,
        search_cols: int,
        row_swap=None,
        col_swap=None,
        extra_below=(),
    ) -> None:
        """Factor panel[:k, :k] in place, carrying companion zones along.

        Rows k..R are multiplier rows, columns k..C companion columns; both
        receive the rank-1 updates, and the side selected by ``rowcol`` is
        divided by the pivot.  ``lam_kind`` says which one-dimensional search
        Lam's strategy performs here ("col" on a tail segment, "row" on a
        column segment).  Search bounds are panel-local exclusive ends; the
        swap callbacks do the physical interchange (the panel aliases the
        swapped storage).
        """
        strat = self.strategy
        for i in range(k):
            if strat != NONE:
                self.plog.advance()
                self._select_pivot(
                    panel,
                    i,
                    strat,
                    module,
                    lam_kind,
                    search_rows,
                    search_cols,
                    row_swap,
                    col_swap,
                )
            piv = panel[i, i]
            if piv == 0.0:
                raise ZeroPivotError(i, module)
            if rowcol == "row":
                col = panel[i + 1 :, i]
                col /= piv
                if col.size:
                    self.max_multiplier = max(self.max_multiplier, float(np.abs(col).max()))
                for zb in extra_below:
                    zb[:, i] /= piv
                    if zb.shape[0]:
                        self.max_multiplier = max(
                            self.max_multiplier, float(np.abs(zb[:, i]).max())
                        )
            else:
                row = panel[i, i + 1 :]
                row /= piv
                if row.size:
                    self.max_multiplier = max(self.max_multiplier, float(np.abs(row).max()))
            panel[i + 1 :, i + 1 :] -= panel[i + 1 :, i : i + 1] * panel[i : i + 1, i + 1 :]
            for zb in extra_below:
                zb[:, i + 1 :] -= zb[:, i : i + 1] * panel[i : i + 1, i + 1 :]

    def _select_pivot(
        self, panel, i, strat, module, lam_kind, search_rows, search_cols, row_swap, col_swap
    ) -> None:
        region = panel[i:search_rows, i:search_cols]
        scale = float(np.abs(region).max()) if region.size else 0.0
        threshold = 64.0 * _EPS64 * scale
        if strat == LAM:
            strat = COLUMN if lam_kind == "col" else ROW
        if strat == COLUMN:
            cands = panel[i, i:search_cols]
            if float(np.abs(cands).max()) <= threshold:
                raise SingularSystemError(module, i)
            col_swap(i, i + search_column_pivot(cands))
        elif strat == ROW:
            cands = panel[i:search_rows, i]
            if float(np.abs(cands).max()) <= threshold:
                raise SingularSystemError(module, i)
            row_swap(i, i + search_row_pivot(cands))
        elif strat == LOCAL:
            seg = panel[i:search_rows, i:search_cols]
            if float(np.abs(seg).max()) <= threshold:
                raise SingularSystemError(module, i)
            dr, dc = search_local_pivot(seg)
            row_swap(i, i + dr)
            col_swap(i, i + dc)

    # ------------------------------------------------------------------
    # charged solve helpers
    def _apply_parts(self, F, parts, X, side="left") -> None:
        for which, unit in parts:
            solve_packed(F, which, unit, X, side, self.ledger)

    # ==================================================================
    # aligned-module forward step
    def _forward_A(self, unit: int) -> None:
        cfg = self.cfg
        m, n, p = self.m, self.n, self.p
        led = self.ledger
        _, j, trunc = self.unit_tags[unit]
        a = j - 1
        g = a
        last = trunc == "trailing"
        corner = last and (self.q > 0 or self.kb > 0)
        tail = self.a_tail(a)
        tail_rows = self.a_tail_rows(a)
        if last:
            band = None
            an = self.bot[:, :m]
            bn = self.bot[:, m:]
            zn_rows = self.bot_rows()
        else:
            band = self.inter[a]
            an = band[:n, :m]
            bn = band[:n, m:p]
            r0 = self.band_rows(a).start
            zn_rows = slice(r0, r0 + n)
        ak = self.bstrip[:, g * p : g * p + m]
        bk = self.bstrip[:, g * p + m : (g + 1) * p]

        # ---- first pivotal block: factor Cm# with its tail companions
        widened = cfg.dm_level != "sharp"
        panel = tail if widened else tail[:, :m]
        tr0 = tail_rows.start
        self._elim_panel(
            panel,
            m,
            cfg.cm_rowcol,
            module=j,
            lam_kind="col",
            search_rows=m,
            search_cols=p if widened else m,
            row_swap=lambda ia, ib: self.swap_rows(tr0 + ia, tr0 + ib),
            col_swap=lambda ia, ib: self.swap_grid_cols(g, ia, ib),
        )
        led.add(lu_cost(m))
        if widened:
            led.add(trisolve_cost(m, n, unit=cfg.cm_rowcol == "row"))
        F_cm = tail[:, :m]
        dm = tail[:, m:]
        if cfg.dm_level == "star":
            solve_packed(F_cm, "U", cfg.cm_rowcol == "col", dm, "left", led)

        # ---- fin chains against the Cm factors
        def a_chain(view, level):
            if view.shape[0] == 0 or level == "raw":
                return
            solve_packed(F_cm, "U", cfg.cm_rowcol == "col", view, "right", led)
            if level == "ring":
                solve_packed(F_cm, "L", cfg.cm_rowcol == "row", view, "right", led)

        an_lvl = "prime" if cfg.an_level == "star" else cfg.an_level
        a_chain(an, an_lvl)
        if not last:
            am = band[n:, :m]
            a_chain(am, "prime" if cfg.am_level == "star" else cfg.am_level)
        if self.kb:
            a_chain(ak, "prime" if cfg.am_level != "raw" else "raw")

        # ---- Bn# (and Bm#, Bk#) via the A1/A2 products
        mult_sub(bn, an, dm, led)
        if not last and cfg.a1 is not None:
            mult_sub(band[n:, m:p], band[n:, :m], dm, led)
        if self.kb:
            mult_sub(bk, ak, dm, led)

        # ---- second pivotal block
        maintain = (not last) and cfg.bm_level in ("dprime", "star")
        if corner:
            pass  # the bordered trailing corner is solved densely below
        else:
            panel2 = band[:, m:p] if maintain else bn
            br0 = zn_rows.start
            extra_below = [bk] if self.kb else ()
            self._elim_panel(
                panel2,
                n,
                cfg.bn_rowcol,
                module=j,
                lam_kind="row",
                search_rows=panel2.shape[0],
                search_cols=n,
                row_swap=lambda ia, ib: self.swap_rows(br0 + ia, br0 + ib),
                col_swap=lambda ia, ib: self.swap_grid_cols(g, m + ia, m + ib),
                extra_below=extra_below,
            )
            led.add(lu_cost(n))
            if maintain:
                led.add(trisolve_cost(n, m, unit=cfg.bn_rowcol == "col"))
            if self.kb:
                led.add(trisolve_cost(n, self.kb, unit=cfg.bn_rowcol == "col"))
        F_bn = bn

        # ---- post chains
        if not last:
            bm = band[n:, m:p]
            if cfg.bm_level == "star":
                solve_packed(F_bn, "L", cfg.bn_rowcol == "row", bm, "right", led)
                if self.kb:
                    solve_packed(F_bn, "L", cfg.bn_rowcol == "row", bk, "right", led)
            cndn = band[:n, p:]
            if cfg.cn_level in ("prime", "ring"):
                solve_packed(F_bn, "L", cfg.bn_rowcol == "row", cndn, "left", led)
            if cfg.cn_level == "ring":
                solve_packed(F_bn, "U", cfg.bn_rowcol == "col", cndn, "left", led)
            if cfg.am_level == "star":
                # Am'' = Am' - Bm* An', then Am* against the remaining factor
                mult_sub(band[n:, :m], bm, an, led)
                solve_packed(F_cm, "L", cfg.cm_rowcol == "row", band[n:, :m], "right", led)
            if cfg.head == "abtct":
                ext = neg_mult(dm, cndn, led)
                solve_packed(F_cm, "U", cfg.cm_rowcol == "col", ext, "left", led)
                self.phi_ext[unit] = ext
            elif cfg.head == "abtce":
                self.phi_ext[unit] = neg_mult(dm, cndn, led)

        # ---- right parts (and bordered columns)
        ztop = self.rhs[tail_rows]
        zbot = self.rhs[zn_rows]
        self._stem_rhs_forward(cfg, F_cm, F_bn, an, dm, ztop, zbot, skip_bn=corner)
        if self.q:
            self._stem_rhs_forward(
                cfg,
                F_cm,
                F_bn,
                an,
                dm,
                self.h[tail_rows],
                self.h[zn_rows],
                mu_only=True,
                skip_bn=corner,
            )
        if not last:
            gm_rows = slice(self.band_rows(a).start + n, self.band_rows(a).stop)
            gm_next = self.rhs[gm_rows]
            am = band[n:, :m]
            bm = band[n:, m:p]
            mult_sub(gm_next, am, ztop, led)
            mult_sub(gm_next, bm, zbot, led)
            if self.q:
                hm_next = self.h[gm_rows]
                mult_sub(hm_next, am, self.h[tail_rows], led)
                mult_sub(hm_next, bm, self.h[zn_rows], led)
        if self.kb:
            mult_sub(self.gk, ak, ztop, led)
            mult_sub(self.hk, ak, self.h[tail_rows], led)
            if not corner:
                mult_sub(self.gk, bk, zbot, led)
                mult_sub(self.hk, bk, self.h[zn_rows], led)
            if not last:
                nxt = self.bstrip[:, (g + 1) * p : (g + 2) * p]
                mult_sub(nxt, bk, band[:n, p:], led)

        # ---- head of the module, subtracted straight into the next tail
        if last:
            if corner:
                self._solve_corner(bn, zbot)
            return
        target = band[n:, p:]
        if cfg.head == "abtct":
            mult_sub(target, band[n:, :m], self.phi_ext[unit], led)
            mult_sub(target, band[n:, m:p], band[:n, p:], led)
        elif cfg.head == "abtce":
            mult_sub(band[n:, m:p], band[n:, :m], dm, led)  # Bm# in the head phase
            mult_sub(target, band[n:, m:p], band[:n, p:], led)
        else:
            mult_sub(target, band[n:, m:p], band[:n, p:], led)

    def _stem_rhs_forward(self, cfg, F_cm, F_bn, an, dm, xtop, xbot, mu_only=False, skip_bn=False):
        """Forward share of the stem solves applied to right-side columns.

        ``mu_only`` serves the bordered H columns, which always take exactly
        the M-side processing; ``skip_bn`` serves the trailing corner, whose
        Bn part is finished densely.
        """
        if xtop.shape[1] == 0:
            return
        cm_mu, cm_nu = cfg.cm_parts
        bn_mu, bn_nu = cfg.bn_parts
        led = self.ledger
        run_mu = cfg.bt != "R" or mu_only
        run_nu = cfg.bt == "C" and not mu_only
        if run_mu:
            self._apply_parts(F_cm, cm_mu, xtop)
            mult_sub(xbot, an, xtop, led)
            if not skip_bn:
                self._apply_parts(F_bn, bn_mu, xbot)
        if run_nu:
            if not skip_bn:
                self._apply_parts(F_bn, bn_nu, xbot)
            mult_sub(xtop, dm, xbot, led)
            self._apply_parts(F_cm, cm_nu, xtop)

    def _solve_corner(self, bn_view, gn_view) -> None:
        """Dense full-pivot solve of the trailing bordered corner.

        Finishes the last n grid unknowns together with the q border
        unknowns from the (n+k)-by-(n+q) system left after the final
        Cm-elimination; needs k == q.
        """
        n, q, kb, r = self.n, self.q, self.kb, self.r
        s = n + kb
        if n + q != s:
            raise ValueError("bordered solve requires k == q")
        led = self.ledger
        S = np.zeros((s, s))
        S[:n, :n] = bn_view
        S[:n, n:] = self.h[self.bot_rows()]
        S[n:, :n] = self.bstrip[:, (self.J - 1) * self.p + self.m :]
        S[n:, n:] = self.hk
        b = np.vstack([gn_view, self.gk])
        perm = np.arange(s)
        led.add(lu_cost(s))
        for i in range(s):
            if self.strategy != NONE:
                seg = S[i:, i:]
                if float(np.abs(seg).max()) == 0.0:
                    raise SingularSystemError(self.J, i)
                dr, dc = search_local_pivot(seg)
                if dr:
                    S[[i, i + dr]] = S[[i + dr, i]]
                    b[[i, i + dr]] = b[[i + dr, i]]
                if dc:
                    S[:, [i, i + dc]] = S[:, [i + dc, i]]
                    perm[[i, i + dc]] = perm[[i + dc, i]]
            piv = S[i, i]
            if piv == 0.0:
                raise ZeroPivotError(i, self.J)
            S[i + 1 :, i] /= piv
            S[i + 1 :, i + 1 :] -= S[i + 1 :, i : i + 1] * S[i : i + 1, i + 1 :]
        solve_packed(S, "L", True, b, "left", led)
        solve_packed(S, "U", False, b, "left", led)
        x = np.empty_like(b)
        x[perm] = b
        gn_view[:] = x[:n]
        self.zH = x[n:]

    # aligned-module backward step ------------------------------------
    def _backward_A(self, unit: int) -> None:
        cfg = self.cfg
        m, n, p, J = self.m, self.n, self.p, self.J
        led = self.ledger
        _, j, trunc = self.unit_tags[unit]
        a = j - 1
        last = trunc == "trailing"
        corner = last and (self.q > 0 or self.kb > 0)
        tail = self.a_tail(a)
        tail_rows = self.a_tail_rows(a)
        F_cm = tail[:, :m]
        dm = tail[:, m:]
        if last:
            band = None
            an = self.bot[:, :m]
            F_bn = self.bot[:, m:]
            zn_rows = self.bot_rows()
        else:
            band = self.inter[a]
            an = band[:n, :m]
            F_bn = band[:n, m:p]
            r0 = self.band_rows(a).start
            zn_rows = slice(r0, r0 + n)
        ztop = self.rhs[tail_rows]
        zbot = self.rhs[zn_rows]

        if not last:
            zm_next = self.rhs[self.band_rows(a).start + n : self.band_rows(a).stop]
            if j + 1 <= J - 1:
                rn = self.band_rows(a + 1).start
                zn_next = self.rhs[rn : rn + n]
            else:
                zn_next = self.rhs[self.bot_rows()]
            z_next = np.concatenate([zm_next, zn_next])
            if unit in self.phi_ext:
                mult_sub(ztop, self.phi_ext[unit], z_next, led)
            mult_sub(zbot, band[:n, p:], z_next, led)
            if self.q:
                mult_sub(zbot, self.h[zn_rows], self.zH, led)
        if self.q:
            mult_sub(ztop, self.h[tail_rows], self.zH, led)

        cm_mu, cm_nu = cfg.cm_parts
        bn_mu, bn_nu = cfg.bn_parts
        if cfg.bt == "R":
            self._apply_parts(F_cm, cm_mu, ztop)
            mult_sub(zbot, an, ztop, led)
            self._apply_parts(F_bn, bn_mu, zbot)
        if cfg.bt != "C":
            if not corner:
                self._apply_parts(F_bn, bn_nu, zbot)
            mult_sub(ztop, dm, zbot, led)
            self._apply_parts(F_cm, cm_nu, ztop)

    # ==================================================================
    # displaced-module steps
    def _forward_D(self, unit: int) -> None:
        cfg = self.cfg
        m, n, p = self.m, self.n, self.p
        led = self.ledger
        _, j, trunc = self.unit_tags[unit]
        if trunc == "leading":
            self._forward_D_leading()
            return
        if trunc == "trailing":
            self._forward_D_trailing()
            return
        d = j - 1
        band = self.inter[d]
        penult = trunc == "penultimate"
        rows = self.band_rows(d)
        gn = self.rhs[rows.start : rows.start + n]
        gm = self.rhs[rows.start + n : rows.stop]
        if penult:
            psi = self.bot[:, :m]
            heads = self.bot[:, m:]
            theta = self.rhs[self.bot_rows()]
        else:
            psi = self.inter[d + 1][:, :m]
            heads = self.inter[d + 1][:, m:p]
            theta = self.rhs[self.band_rows(d + 1)]

        # ---- first pivotal block Bn# with the Bm# multiplier rows
        maintain = cfg.bm_level in ("dprime", "star")
        panel = band[:, m:p] if maintain else band[:n, m:p]
        br0 = rows.start
        self._elim_panel(
            panel,
            n,
            cfg.bn_rowcol,
            module=j,
            lam_kind="row",
            search_rows=panel.shape[0],
            search_cols=n,
            row_swap=lambda ia, ib: self.swap_rows(br0 + ia, br0 + ib),
            col_swap=lambda ia, ib: self.swap_grid_cols(d, m + ia, m + ib),
        )
        led.add(lu_cost(n))
        if maintain:
            led.add(trisolve_cost(n, m, unit=cfg.bn_rowcol == "col"))
        F_bn = band[:n, m:p]
        bm = band[n:, m:p]
        if cfg.bm_level == "star":
            solve_packed(F_bn, "L", cfg.bn_rowcol == "row", bm, "right", led)
        cn = band[:n, p : p + m]
        if cfg.cn_level in ("prime", "ring"):
            solve_packed(F_bn, "L", cfg.bn_rowcol == "row", cn, "left", led)
        mult_sub(band[n:, p : p + m], bm, cn, led)  # Cm# of the stem
        dn = band[:n, p + m :]
        dmphi = band[n:, p + m :]
        if cfg.dn_level in ("prime", "ring", "star"):
            solve_packed(F_bn, "L", cfg.bn_rowcol == "row", dn, "left", led)
        if cfg.dm_level != "sharp":
            mult_sub(dmphi, bm, dn, led)  # Dm#, the tail companion

        # ---- second pivotal block Cm# with its Dm companions
        widened = cfg.dm_level != "sharp"
        panel2 = band[n:, p:] if widened else band[n:, p : p + m]
        mr0 = rows.start + n
        self._elim_panel(
            panel2,
            m,
            cfg.cm_rowcol,
            module=j,
            lam_kind="col",
            search_rows=m,
            search_cols=p if widened else m,
            row_swap=lambda ia, ib: self.swap_rows(mr0 + ia, mr0 + ib),
            col_swap=lambda ia, ib: self.swap_grid_cols(d + 1, ia, ib),
        )
        led.add(lu_cost(m))
        if widened:
            led.add(trisolve_cost(m, n, unit=cfg.cm_rowcol == "row"))
        F_cm = band[n:, p : p + m]
        if cfg.dm_level == "star":
            solve_packed(F_cm, "U", cfg.cm_rowcol == "col", dmphi, "left", led)
        if cfg.dn_level == "star":
            mult_sub(dn, cn, dmphi, led)
            solve_packed(F_bn, "U", cfg.bn_rowcol == "col", dn, "left", led)
        if cfg.an_level != "raw" and psi.shape[0]:
            solve_packed(F_cm, "U", cfg.cm_rowcol == "col", psi, "right", led)
            if cfg.an_level == "ring":
                solve_packed(F_cm, "L", cfg.cm_rowcol == "row", psi, "right", led)

        # ---- right parts
        self._stem_rhs_forward_D(cfg, F_bn, F_cm, bm, cn, gn, gm)
        if cfg.bt == "R":
            w = fixed_matmul(bm, gn)
            led.add(matmul_cost(m, n, self.r))
            mult_sub(theta, psi, gm, led)
            mult_add(theta, psi, w, led)
        else:
            mult_sub(theta, psi, gm, led)

        # ---- head, straight into the next tail [Bn; Bm]
        if cfg.head == "dbtr":
            dsc = dmphi.copy()
            mult_sub(dsc, bm, dn, led)  # Dm# scratch; the stored Dm stays raw
            mult_sub(heads, psi, dsc, led)
        else:
            mult_sub(heads, psi, dmphi, led)

    def _stem_rhs_forward_D(self, cfg, F_bn, F_cm, bm, cn, xn, xm) -> None:
        cm_mu, cm_nu = cfg.cm_parts
        bn_mu, bn_nu = cfg.bn_parts
        led = self.ledger
        if cfg.bt != "R":
            self._apply_parts(F_bn, bn_mu, xn)
            mult_sub(xm, bm, xn, led)
            self._apply_parts(F_cm, cm_mu, xm)
        if cfg.bt == "C":
            self._apply_parts(F_cm, cm_nu, xm)
            mult_sub(xn, cn, xm, led)
            self._apply_parts(F_bn, bn_nu, xn)

    def _forward_D_leading(self) -> None:
        cfg = self.cfg
        m, n, p = self.m, self.n, self.p
        led = self.ledger
        tail = self.top
        widened = cfg.dm_level != "sharp"
        panel = tail if widened else tail[:, :m]
        self._elim_panel(
            panel,
            m,
            cfg.cm_rowcol,
            module=0,
            lam_kind="col",
            search_rows=m,
            search_cols=p if widened else m,
            row_swap=lambda ia, ib: self.swap_rows(ia, ib),
            col_swap=lambda ia, ib: self.swap_grid_cols(0, ia, ib),
        )
        led.add(lu_cost(m))
        if widened:
            led.add(trisolve_cost(m, n, unit=cfg.cm_rowcol == "row"))
        F_cm = tail[:, :m]
        dm = tail[:, m:]
        if cfg.dm_level == "star":
            solve_packed(F_cm, "U", cfg.cm_rowcol == "col", dm, "left", led)
        psi = self.inter[0][:, :m]
        if cfg.an_level != "raw":
            solve_packed(F_cm, "U", cfg.cm_rowcol == "col", psi, "right", led)
            if cfg.an_level == "ring":
                solve_packed(F_cm, "L", cfg.cm_rowcol == "row", psi, "right", led)
        ztop = self.rhs[:m]
        cm_mu, cm_nu = cfg.cm_parts
        if cfg.bt != "R":
            self._apply_parts(F_cm, cm_mu, ztop)
        if cfg.bt == "C":
            self._apply_parts(F_cm, cm_nu, ztop)
        mult_sub(self.rhs[self.band_rows(0)], psi, ztop, led)
        mult_sub(self.inter[0][:, m:p], psi, dm, led)

    def _forward_D_trailing(self) -> None:
        cfg = self.cfg
        m, n, J = self.m, self.n, self.J
        F = self.bot[:, m:]
        br0 = self.bot_rows().start
        self._elim_panel(
            F,
            n,
            cfg.bn_rowcol,
            module=J,
            lam_kind="row",
            search_rows=n,
            search_cols=n,
            row_swap=lambda ia, ib: self.swap_rows(br0 + ia, br0 + ib),
            col_swap=lambda ia, ib: self.swap_grid_cols(J - 1, m + ia, m + ib),
        )
        self.ledger.add(lu_cost(n))
        zb = self.rhs[self.bot_rows()]
        bn_mu, bn_nu = cfg.bn_parts
        if cfg.bt != "R":
            self._apply_parts(F, bn_mu, zb)
        if cfg.bt == "C":
            self._apply_parts(F, bn_nu, zb)

    def _backward_D(self, unit: int) -> None:
        cfg = self.cfg
        m, n, p = self.m, self.n, self.p
        led = self.ledger
        _, j, trunc = self.unit_tags[unit]
        cm_mu, cm_nu = cfg.cm_parts
        bn_mu, bn_nu = cfg.bn_parts
        if trunc == "trailing":
            if cfg.bt == "R":
                F = self.bot[:, m:]
                zb = self.rhs[self.bot_rows()]
                self._apply_parts(F, bn_mu, zb)
                self._apply_parts(F, bn_nu, zb)
            return
        if trunc == "leading":
            zm = self.rhs[:m]
            zn1 = self.rhs[self.band_rows(0)][:n]
            mult_sub(zm, self.top[:, m:], zn1, led)
            if cfg.bt == "R":
                F_cm = self.top[:, :m]
                self._apply_parts(F_cm, cm_mu, zm)
                self._apply_parts(F_cm, cm_nu, zm)
            return
        d = j - 1
        band = self.inter[d]
        rows = self.band_rows(d)
        zn = self.rhs[rows.start : rows.start + n]
        zm = self.rhs[rows.start + n : rows.stop]
        if trunc == "penultimate":
            zn_next = self.rhs[self.bot_rows()]
        else:
            rn = self.band_rows(d + 1).start
            zn_next = self.rhs[rn : rn + n]
        mult_sub(self.rhs[rows], band[:, p + m :], zn_next, led)
        if cfg.bt == "R":
            F_bn = band[:n, m:p]
            F_cm = band[n:, p : p + m]
            self._apply_parts(F_bn, bn_mu, zn)
            mult_sub(zm, band[n:, m:p], zn, led)
            self._apply_parts(F_cm, cm_mu, zm)
            self._apply_parts(F_cm, cm_nu, zm)
            mult_sub(zn, band[:n, p : p + m], zm, led)
            self._apply_parts(F_bn, bn_nu, zn)

    # ==================================================================
    def run_forward(self) -> None:
        for unit in range(len(self.unit_tags)):
            before = self.ledger.mul
            if self.cfg.kind == "A":
                self._forward_A(unit)
            else:
                self._forward_D(unit)
            self.fwd_mul.append(self.ledger.mul - before)

    def run_backward(self) -> None:
        self.bwd_mul = [0] * len(self.unit_tags)
        for unit in reversed(range(len(self.unit_tags))):
            before = self.ledger.mul
            if self.cfg.kind == "A":
                self._backward_A(unit)
            else:
                self._backward_D(unit)
            self.bwd_mul[unit] = self.ledger.mul - before

    def solution(self) -> np.ndarray:
        out = np.empty((self.dims.n_unknowns, self.r))
        out[self.colperm] = self.rhs
        if self.q:
            out = np.vstack([out, self.zH])
        return out


# ----------------------------------------------------------------------
# operations on top of the sweep

_VIEW_CFG_A = MethodConfig(mid="_views", kind="A", cm_mode="SC", bn_mode="SR")
_VIEW_CFG_D = MethodConfig(mid="_views", kind="D", cm_mode="SC", bn_mode="SR")


def disassemble(system: AbdSystem, kind: str) -> Decomposition:
    """Split a validated system into ordered modules plus end adjustments.

    Aligned disassembly yields modules 1..J-1 plus the trailing truncated
    module (the leading adjustment is an empty head); displaced disassembly
    yields modules 1..J-2 plus the three end forms.
    """
    if kind not in ("A", "D"):
        raise ValueError(f"module kind must be 'A' or 'D', got {kind!r}")
    sweep = Sweep(system, _VIEW_CFG_A if kind == "A" else _VIEW_CFG_D)
    states = sweep.modules()
    if kind == "A":
        modules = states[:-1]
        leading = TruncatedEnd("A", "leading", None)
        trailing = [TruncatedEnd("A", "trailing", states[-1])]
    else:
        modules = [s for s in states if s.truncated is None]
        leading = TruncatedEnd("D", "leading", states[0])
        trailing = [
            TruncatedEnd("D", "penultimate", states[-2]),
            TruncatedEnd("D", "trailing", states[-1]),
        ]
    return Decomposition(modules, leading, trailing, sweep)


def forward_step(module: ModuleState) -> ModuleState:
    """Run the two-step forward sweep on one module of a bound sweep."""
    sweep = module.sweep
    if sweep.cfg.mid == "_views":
        raise ValueError("sweep carries no method; bind one via methods.make_sweep")
    if sweep.cfg.kind == "A":
        sweep._forward_A(module.unit)
    else:
        sweep._forward_D(module.unit)
    return module


def backward_step(module: ModuleState) -> np.ndarray:
    """Back-substitute one module; returns its solution rows."""
    sweep = module.sweep
    if sweep.cfg.kind == "A":
        sweep._backward_A(module.unit)
    else:
        sweep._backward_D(module.unit)
    s = sweep
    if module.kind == "A":
        a = module.index - 1 if module.truncated is None else s.J - 1
        zn = s.rhs[s.bot_rows()] if module.truncated else s.rhs[s.band_rows(a)][: s.n]
        return np.vstack([s.rhs[s.a_tail_rows(a)], zn])
    if module.truncated == "leading":
        return s.rhs[: s.m].copy()
    if module.truncated == "trailing":
        return s.rhs[s.bot_rows()].copy()
    return s.rhs[s.band_rows(module.index - 1)].copy()
