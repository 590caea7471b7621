"""Fixed block text format: the TESTA/TESTB reference files and writers.

A blocks file is one or more sections, each a header line (any line with
alphabetic characters, e.g. "TOP BLOCK") followed by data rows of c
coefficient fields plus one right-hand-side field.  Values are tokenized on
whitespace rather than sliced into fixed columns: every value in the
listings carries an explicit decimal point and separator, so tokenization
is unambiguous and robust against transcription quirks, and it lets ``gen``
emit wider fields than the historical F6.0 without breaking the parser.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import AbdSystem, Dims
from .errors import FormatError


@dataclass
class Section:
    header: str
    rows: np.ndarray  # (nrows, c + 1)


@dataclass
class BlocksFile:
    """Parsed blocks file: per-section headers and value rows."""

    sections: list

    @property
    def header(self) -> str:
        return self.sections[0].header

    @property
    def rows(self) -> np.ndarray:
        return np.vstack([s.rows for s in self.sections])


def _is_header(line: str) -> bool:
    return any(ch.isalpha() for ch in line)


def parse_fixed_blocks(text: str, coeff_count: int) -> BlocksFile:
    """Parse sectioned rows of ``coeff_count`` coefficients plus one RHS value."""
    if not text.strip():
        raise FormatError("empty blocks file")
    sections: list[Section] = []
    header = None
    rows: list[list[float]] = []

    def close():
        if header is not None:
            sections.append(Section(header, np.array(rows, dtype=float).reshape(len(rows), coeff_count + 1)))

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if _is_header(line):
            close()
            header = line.strip()
            rows = []
            continue
        if header is None:
            raise FormatError("data before the first section header", lineno)
        fields = line.split()
        if len(fields) != coeff_count + 1:
            raise FormatError(
                f"expected {coeff_count + 1} fields, found {len(fields)}", lineno
            )
        try:
            rows.append([float(tok) for tok in fields])
        except ValueError as exc:
            raise FormatError(f"unparsable token: {exc}", lineno)
    close()
    if not sections:
        raise FormatError("no sections found")
    return BlocksFile(sections)


def load_reference_system(testa_path, testb_path, m: int, n: int, J: int) -> AbdSystem:
    """Build an ABD system from TESTA/TESTB-style files.

    TESTA holds the top block (m rows) and, after the BOTTOM BLOCK marker,
    the bottom block (n rows), each row p coefficients plus the right-hand
    side.  TESTB holds the repeated interior block, p rows of 2p
    coefficients plus the right-hand side, replicated for the J-1 interior
    positions.
    """
    dims = Dims(m, n, J)
    p = dims.p
    fa = parse_fixed_blocks(Path(testa_path).read_text(), p)
    fb = parse_fixed_blocks(Path(testb_path).read_text(), 2 * p)
    if len(fa.sections) != 2:
        raise FormatError(
            f"TESTA-style file needs 2 sections, found {len(fa.sections)}"
        )
    top_rows, bot_rows = fa.sections[0].rows, fa.sections[1].rows
    if top_rows.shape[0] != m or bot_rows.shape[0] != n:
        raise FormatError(
            f"declared m={m}, n={n} but sections hold {top_rows.shape[0]} and {bot_rows.shape[0]} rows"
        )
    block_rows = fb.sections[0].rows
    if block_rows.shape[0] != p:
        raise FormatError(f"interior block needs {p} rows, found {block_rows.shape[0]}")
    top = top_rows[:, :p]
    bot = bot_rows[:, :p]
    block = block_rows[:, : 2 * p]
    inter = np.repeat(block[None, :, :], J - 1, axis=0)
    rhs = np.zeros((J * p, 1))
    rhs[:m, 0] = top_rows[:, p]
    for b in range(J - 1):
        rhs[m + b * p : m + (b + 1) * p, 0] = block_rows[:, 2 * p]
    rhs[J * p - n :, 0] = bot_rows[:, p]
    return AbdSystem(dims, top, inter, bot, rhs)


def reference_paths() -> tuple[Path, Path]:
    """Paths of the bundled TESTA/TESTB listings (m=10, n=1, J=11)."""
    root = resources.files("abdsolve") / "data"
    return Path(str(root / "TESTA")), Path(str(root / "TESTB"))


def load_bundled_reference() -> AbdSystem:
    ta, tb = reference_paths()
    return load_reference_system(ta, tb, 10, 1, 11)


def _fmt_row(values) -> str:
    return " ".join(f"{v:12.6f}" for v in values)


def write_system(system: AbdSystem, testa_path, testb_path) -> None:
    """Write a repeated-block system in the TESTA/TESTB text format.

    All interior blocks must be identical (that is what the format can
    express).  Six decimals, which round-trips the generator output.
    """
    d = system.dims
    blocks_repeat = all(
        np.array_equal(system.interior[0], system.interior[b]) for b in range(1, d.J - 1)
    )
    rhs_repeat = all(
        np.array_equal(
            system.rhs[d.m : d.m + d.p, 0], system.rhs[d.m + b * d.p : d.m + (b + 1) * d.p, 0]
        )
        for b in range(1, d.J - 1)
    )
    if not (blocks_repeat and rhs_repeat):
        raise ValueError("the text format holds one repeated interior block and rhs")
    m, n, p = d.m, d.n, d.p
    with open(testa_path, "w") as fh:
        fh.write("TOP BLOCK\n")
        for i in range(m):
            fh.write(_fmt_row(list(system.top[i]) + [system.rhs[i, 0]]) + "\n")
        fh.write("BOTTOM BLOCK\n")
        for i in range(n):
            fh.write(
                _fmt_row(list(system.bottom[i]) + [system.rhs[d.n_unknowns - n + i, 0]])
                + "\n"
            )
    with open(testb_path, "w") as fh:
        fh.write(f"RECURRENT BLOCK {p}X({2 * p}+1)\n")
        for i in range(p):
            fh.write(
                _fmt_row(list(system.interior[0][i]) + [system.rhs[m + i, 0]]) + "\n"
            )


def write_solution(path, solution: np.ndarray) -> None:
    """Three values per line, scientific notation, 15 significant digits."""
    flat = np.asarray(solution).reshape(-1, order="F")
    with open(path, "w") as fh:
        for i in range(0, len(flat), 3):
            fh.write("".join(f"{v:25.15E}" for v in flat[i : i + 3]) + "\n")


def write_stats(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
