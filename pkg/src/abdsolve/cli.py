"""Command-line interface.

Subcommands:

solve    factor and solve a system from TESTA/TESTB-style files or a seeded
         random instance; writes the solution text file and a JSON stats
         sidecar.
assess   predicted-versus-measured table for all methods at given m, n, r.
verify   run the oracle cross-check battery; nonzero exit on any failure.
gen      emit a random repeated-block system in the TESTA/TESTB format.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .core import Dims, random_repeating_system, random_system, residual_norm
from .errors import AbdError
from .fileio import (
    load_reference_system,
    write_solution,
    write_stats,
    write_system,
)
from .methods import (
    METHOD_IDS,
    get_method,
    method_registry,
    predicted_mul,
    predicted_storage,
    solve,
)
from .oracle import dense_lu_solve, max_rel_diff
from .pivoting import admissible, normalize_strategy


def _add_system_args(sp):
    sp.add_argument("--testa", help="TESTA-style file (top and bottom blocks)")
    sp.add_argument("--testb", help="TESTB-style file (repeated interior block)")
    sp.add_argument("--m", type=int, help="rows of the top block (default: inferred)")
    sp.add_argument("--n", type=int, help="rows of the bottom block (default: inferred)")
    sp.add_argument("--grid-points", type=int, default=11, dest="J",
                    help="number of grid points J for file input (default 11)")
    sp.add_argument("--random", nargs=5, type=int, metavar=("M", "N", "J", "R", "SEED"),
                    help="generate a seeded random system instead of reading files")


def _load_system(args):
    if args.random is not None:
        m, n, J, r, seed = args.random
        system, _ = random_system(Dims(m, n, J, r), seed)
        return system
    if not (args.testa and args.testb):
        raise SystemExit("either --random or both --testa and --testb are required")
    if args.m is None or args.n is None:
        # infer the split from the TESTA sections
        from .fileio import parse_fixed_blocks
        from pathlib import Path

        text = Path(args.testa).read_text()
        width = len(text.strip().splitlines()[1].split()) - 1
        fa = parse_fixed_blocks(text, width)
        m = fa.sections[0].rows.shape[0]
        n = fa.sections[1].rows.shape[0]
    else:
        m, n = args.m, args.n
    return load_reference_system(args.testa, args.testb, m, n, args.J)


def _cmd_solve(args) -> int:
    system = _load_system(args)
    strategy = normalize_strategy(args.pivoting)
    solution, stats = solve(system, args.method, strategy)
    res = residual_norm(system, solution[: system.dims.n_unknowns])
    write_solution(args.out, solution)
    write_stats(
        args.out + ".stats.json",
        {
            "method": stats.method,
            "pivoting": stats.pivoting,
            "mul_total": stats.mul_total,
            "predicted_mul": stats.predicted_mul_total,
            "predicted_mul_per_module": stats.predicted_mul_per_module,
            "storage": stats.storage_locs,
            "max_multiplier": stats.max_multiplier,
            "pivot_count": stats.pivot_count,
            "residual": res,
        },
    )
    print(f"{stats.method}: {system.dims.n_unknowns} unknowns, "
          f"{stats.mul_total} mul, residual {res:.3e} -> {args.out}")
    return 0


def _cmd_assess(args) -> int:
    dims = Dims(args.m, args.n, max(args.J, 3), args.r)
    system, _ = random_system(dims, args.seed)
    rows = []
    ok_all = True
    for desc in method_registry():
        per, _ = predicted_mul(desc, dims)
        sol, stats = solve(system, desc, "none")
        measured = stats.mul_interior_module
        ok = measured == per
        ok_all &= ok
        rows.append(
            (desc.id, desc.extra_mul(dims.m, dims.n, dims.r),
             predicted_storage(desc, dims),
             "*" if desc.lam_admissible else "",
             "*" if desc.local_admissible else "",
             measured, "ok" if ok else "MISMATCH")
        )
    head = f"{'method':7s} {'extra-mul':>9s} {'storage':>8s} {'Lam':>4s} {'local':>6s} {'measured':>9s}  check"
    print(f"per-module counts at m={dims.m} n={dims.n} r={dims.r} "
          f"(common {predicted_mul('BCBR', dims)[0]})")
    print(head)
    for mid, extra, stor, lam, loc, meas, chk in rows:
        print(f"{mid:7s} {extra:9d} {stor:8d} {lam:>4s} {loc:>6s} {meas:9d}  {chk}")
    return 0 if ok_all else 1


def _cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    failures = 0
    for case in range(args.cases):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 4))
        J = int(rng.integers(2, 7))
        r = int(rng.integers(1, 3))
        dims = Dims(m, n, J, r)
        system, _ = random_system(dims, int(rng.integers(0, 2**31)))
        from .core import assemble_dense

        report = dense_lu_solve(assemble_dense(system), system.rhs)
        for desc in method_registry():
            sol, stats = solve(system, desc, "none")
            diff = max_rel_diff(sol, report.solution)
            worst = max(worst, diff)
            if diff > 1e-8:
                failures += 1
                print(f"FAIL {desc.id} m={m} n={n} J={J} r={r}: {diff:.3e}")
            per, total = predicted_mul(desc, dims)
            if stats.mul_total != total or (
                stats.mul_interior_module not in (None, per)
            ):
                failures += 1
                print(f"FAIL {desc.id}: count mismatch")
    print(f"verify: {args.cases} systems x {len(METHOD_IDS)} methods, "
          f"worst deviation {worst:.3e}, {failures} failures")
    return 0 if failures == 0 else 1


def _cmd_gen(args) -> int:
    dims = Dims(args.m, args.n, args.J, 1)
    system, _ = random_repeating_system(dims, args.seed)
    write_system(system, args.testa, args.testb)
    print(f"wrote {args.testa} and {args.testb} (m={args.m} n={args.n} J={args.J})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="abdsolve",
        description="Band/block elimination methods for almost block diagonal systems",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve a system and write solution + stats")
    _add_system_args(sp)
    sp.add_argument("--method", required=True, choices=METHOD_IDS)
    sp.add_argument("--pivoting", default="none",
                    help="none | row | column | lam | local (default none)")
    sp.add_argument("--out", default="solution.txt", help="solution file path")
    sp.add_argument("--repeat", type=int, default=1,
                    help="solve this many times (manual timing aid)")
    sp.set_defaults(func=_cmd_solve_repeat)

    sp = sub.add_parser("assess", help="predicted vs measured per-module table")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--J", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_assess)

    sp = sub.add_parser("verify", help="oracle cross-check battery")
    sp.add_argument("--cases", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("gen", help="emit a random system in the text format")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--J", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--testa", default="TESTA.gen")
    sp.add_argument("--testb", default="TESTB.gen")
    sp.set_defaults(func=_cmd_gen)
    return ap


def _cmd_solve_repeat(args) -> int:
    rc = 0
    for _ in range(max(1, args.repeat)):
        rc = _cmd_solve(args)
    return rc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AbdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
