"""Realize finite windows of an operator matrix as dense blocks with index maps."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import IO

import numpy as np

from .geometry import IndexSet, StarlikeDomain, lattice_section
from .operators import OperatorSpec

__all__ = [
    "SectionMatrix",
    "assemble",
    "fsm_section",
    "rfsm_section",
    "overflow_block",
    "write_section_csv",
]


@dataclass(frozen=True, eq=False)
class SectionMatrix:
    """Dense block data[r, c] = entry(operator, rows[r], cols[c])."""

    rows: IndexSet
    cols: IndexSet
    data: np.ndarray
    operator: OperatorSpec

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def assemble(operator: OperatorSpec, rows: IndexSet, cols: IndexSet) -> SectionMatrix:
    """Materialize the block of the operator matrix over rows x cols."""
    if rows.dimension != operator.dimension or cols.dimension != operator.dimension:
        raise ValueError("index set dimension mismatch")
    data = np.zeros((len(rows), len(cols)), dtype=complex)
    diffs = operator.nonzero_diffs()
    # Fill along the finitely many stored diagonals rather than all pairs.
    for r, i in enumerate(rows.points):
        for d in diffs:
            j = tuple(a - b for a, b in zip(i, d))
            if j in cols:
                value = operator.entry(i, j)
                if value != 0:
                    data[r, cols.index(j)] = value
    return SectionMatrix(rows, cols, data, operator)


def fsm_section(operator: OperatorSpec, domain: StarlikeDomain, n: int) -> SectionMatrix:
    """Square section over the n-th lattice window."""
    window = lattice_section(domain, n)
    return assemble(operator, window, window)


def rfsm_section(
    operator: OperatorSpec, domain: StarlikeDomain, m: int, n: int
) -> SectionMatrix:
    """Rectangular section: rows over window m, columns over window n."""
    if m < 1 or n < 1:
        raise ValueError("cut-offs must be >= 1")
    return assemble(operator, lattice_section(domain, m), lattice_section(domain, n))


def overflow_block(
    operator: OperatorSpec, domain: StarlikeDomain, m: int, n: int
) -> SectionMatrix:
    """Rows of the operator's action on window-n columns that escape window m.

    For a band operator every nonzero entry outside the m-window lands in
    the max-norm expansion of the n-window by the band width, so this
    finite block carries the full escaping action and its spectral norm
    is exactly the norm of the complementary truncation.
    """
    width = operator.band_width()
    cols = lattice_section(domain, n)
    ball = list(
        itertools.product(range(-width, width + 1), repeat=operator.dimension)
    )
    expanded = {
        tuple(a + b for a, b in zip(p, d)) for p in cols.points for d in ball
    }
    escaped = [p for p in expanded if not domain.contains(p, m)]
    rows = IndexSet.from_points(operator.dimension, escaped)
    return assemble(operator, rows, cols)


def write_section_csv(section: SectionMatrix, stream: IO[str]) -> None:
    """Dump a section as CSV rows (row index, col index, real, imag).

    Multi-coordinate indices are joined with ';'.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["row", "col", "real", "imag"])
    for r, i in enumerate(section.rows.points):
        for c, j in enumerate(section.cols.points):
            v = section.data[r, c]
            writer.writerow(
                [
                    ";".join(str(x) for x in i),
                    ";".join(str(x) for x in j),
                    f"{v.real:.17g}",
                    f"{v.imag:.17g}",
                ]
            )
