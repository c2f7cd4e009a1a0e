"""Symbolic band operators on integer lattices with exact, lazy entry access.

An operator is a rule for the matrix entry a_{ij} over pairs of lattice
points, never a stored matrix.  Variants cover banded diagonal tables,
1-D block-periodic matrices, extended adjacency matrices of disjoint edge
sets, lattice shifts and shift compositions.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from functools import cached_property
from math import sqrt
from typing import Iterable, Mapping, Sequence

from .errors import UnboundedBandError
from .geometry import IndexSet, Point

__all__ = [
    "OperatorSpec",
    "BandDiagonals",
    "BlockPeriodic",
    "AdjacencyGraph",
    "Shift",
    "ShiftComposed",
    "AdjointSpec",
    "ConstantRule",
    "PeriodicRule",
    "TableRule",
    "SupportedVector",
    "as_point",
    "compose_shift",
    "identity_operator",
]


def as_point(value, dimension: int) -> Point:
    """Normalize an int or coordinate sequence to a lattice point tuple."""
    if isinstance(value, int):
        if dimension != 1:
            raise ValueError("bare integers are points only in dimension 1")
        return (value,)
    point = tuple(int(c) for c in value)
    if len(point) != dimension:
        raise ValueError(f"point {point} does not have dimension {dimension}")
    return point


def _max_norm(p: Point) -> int:
    return max(abs(c) for c in p)


def _add(p: Point, q: Point) -> Point:
    return tuple(a + b for a, b in zip(p, q))


def _sub(p: Point, q: Point) -> Point:
    return tuple(a - b for a, b in zip(p, q))


def _neg(p: Point) -> Point:
    return tuple(-a for a in p)


# ---------------------------------------------------------------------------
# coefficient rules for diagonal tables
# ---------------------------------------------------------------------------


class CoefficientRule(abc.ABC):
    """Value of one stored diagonal as a function of the row index."""

    @abc.abstractmethod
    def value_at(self, i: Point) -> complex: ...

    @abc.abstractmethod
    def is_trivial(self) -> bool: ...

    @abc.abstractmethod
    def adjoint_shifted(self, offset: Point) -> "CoefficientRule":
        """Rule i -> conj(self(i + offset)); used to transpose diagonal tables."""


@dataclass(frozen=True)
class ConstantRule(CoefficientRule):
    value: complex

    def value_at(self, i: Point) -> complex:
        return self.value

    def is_trivial(self) -> bool:
        return self.value == 0

    def adjoint_shifted(self, offset: Point) -> "ConstantRule":
        return ConstantRule(complex(self.value).conjugate())


@dataclass(frozen=True)
class PeriodicRule(CoefficientRule):
    """Row-periodic coefficients: value depends on i mod period (componentwise)."""

    period: tuple[int, ...]
    table: tuple[tuple[Point, complex], ...]

    @classmethod
    def from_mapping(cls, period: Sequence[int], table: Mapping) -> "PeriodicRule":
        per = tuple(int(q) for q in period)
        if any(q < 1 for q in per):
            raise ValueError("period entries must be >= 1")
        items = sorted(
            (tuple(k % q for k, q in zip(as_point(key, len(per)), per)), complex(val))
            for key, val in table.items()
        )
        return cls(per, tuple(items))

    @cached_property
    def _lookup(self) -> dict[Point, complex]:
        return dict(self.table)

    def value_at(self, i: Point) -> complex:
        residue = tuple(k % q for k, q in zip(i, self.period))
        return self._lookup.get(residue, 0j)

    def is_trivial(self) -> bool:
        return all(v == 0 for _, v in self.table)

    def adjoint_shifted(self, offset: Point) -> "PeriodicRule":
        shifted = {
            tuple((r - d) % q for r, d, q in zip(res, offset, self.period)): v.conjugate()
            for res, v in self.table
        }
        return PeriodicRule.from_mapping(self.period, shifted)


@dataclass(frozen=True)
class TableRule(CoefficientRule):
    """Finite table of row coefficients with a default elsewhere."""

    table: tuple[tuple[Point, complex], ...]
    default: complex = 0j

    @classmethod
    def from_mapping(
        cls, table: Mapping, default: complex = 0j, dimension: int = 1
    ) -> "TableRule":
        items = sorted((as_point(k, dimension), complex(v)) for k, v in table.items())
        return cls(tuple(items), complex(default))

    @cached_property
    def _lookup(self) -> dict[Point, complex]:
        return dict(self.table)

    def value_at(self, i: Point) -> complex:
        return self._lookup.get(i, self.default)

    def is_trivial(self) -> bool:
        return self.default == 0 and all(v == 0 for _, v in self.table)

    def adjoint_shifted(self, offset: Point) -> "TableRule":
        shifted = {_sub(k, offset): v.conjugate() for k, v in self.table}
        return TableRule.from_mapping(
            shifted, complex(self.default).conjugate(), len(offset)
        )


# ---------------------------------------------------------------------------
# vectors of finite support
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SupportedVector:
    """Finitely supported complex vector over the lattice; absent entries are 0."""

    dimension: int
    entries: Mapping[Point, complex]

    @classmethod
    def from_entries(cls, dimension: int, entries: Mapping) -> "SupportedVector":
        canonical = {}
        for key, val in entries.items():
            v = complex(val)
            if v != 0:
                canonical[as_point(key, dimension)] = v
        return cls(dimension, canonical)

    @classmethod
    def unit(cls, point, dimension: int = 1) -> "SupportedVector":
        return cls(dimension, {as_point(point, dimension): 1.0 + 0j})

    @classmethod
    def zero(cls, dimension: int = 1) -> "SupportedVector":
        return cls(dimension, {})

    def get(self, point) -> complex:
        return self.entries.get(as_point(point, self.dimension), 0j)

    def support(self) -> list[Point]:
        return sorted(self.entries)

    def norm(self) -> float:
        return sqrt(sum(abs(v) ** 2 for v in self.entries.values()))

    def restrict(self, index_set: IndexSet) -> "SupportedVector":
        kept = {p: v for p, v in self.entries.items() if p in index_set}
        return SupportedVector(self.dimension, kept)

    def restrict_outside(self, index_set: IndexSet) -> "SupportedVector":
        kept = {p: v for p, v in self.entries.items() if p not in index_set}
        return SupportedVector(self.dimension, kept)

    def to_array(self, index_set: IndexSet):
        import numpy as np

        out = np.zeros(len(index_set), dtype=complex)
        for p, v in self.entries.items():
            if p in index_set:
                out[index_set.index(p)] = v
        return out

    @classmethod
    def from_array(cls, index_set: IndexSet, values) -> "SupportedVector":
        entries = {
            p: complex(v) for p, v in zip(index_set.points, values) if complex(v) != 0
        }
        return cls(index_set.dimension, entries)

    def __add__(self, other: "SupportedVector") -> "SupportedVector":
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")
        out = dict(self.entries)
        for p, v in other.entries.items():
            w = out.get(p, 0j) + v
            if w == 0:
                out.pop(p, None)
            else:
                out[p] = w
        return SupportedVector(self.dimension, out)

    def __sub__(self, other: "SupportedVector") -> "SupportedVector":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "SupportedVector":
        s = complex(scalar)
        if s == 0:
            return SupportedVector(self.dimension, {})
        return SupportedVector(self.dimension, {p: s * v for p, v in self.entries.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SupportedVector)
            and self.dimension == other.dimension
            and self.entries == other.entries
        )

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# operator variants
# ---------------------------------------------------------------------------


class OperatorSpec(abc.ABC):
    """Common interface of all symbolic operator descriptions."""

    dimension: int

    @abc.abstractmethod
    def entry(self, i, j) -> complex:
        """Matrix entry a_{ij}."""

    @abc.abstractmethod
    def nonzero_diffs(self) -> frozenset[Point]:
        """All i - j values at which entries may be nonzero."""

    @abc.abstractmethod
    def adjoint(self) -> "OperatorSpec":
        """Spec whose entries are conj(a_{ji})."""

    def band_width(self) -> int:
        """Least w with a_{ij} = 0 whenever max-norm of i - j exceeds w."""
        diffs = self.nonzero_diffs()
        return max((_max_norm(d) for d in diffs), default=0)

    def apply(self, u: SupportedVector) -> SupportedVector:
        """Exact matrix-vector product on a finitely supported vector."""
        if u.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        acc: dict[Point, complex] = {}
        diffs = self.nonzero_diffs()
        for j, val in u.entries.items():
            for d in diffs:
                i = _add(j, d)
                a = self.entry(i, j)
                if a != 0:
                    acc[i] = acc.get(i, 0j) + a * val
        return SupportedVector(self.dimension, {p: v for p, v in acc.items() if v != 0})


@dataclass(frozen=True)
class BandDiagonals(OperatorSpec):
    """Entries a_{ij} = f_{i-j}(i) for finitely many stored offsets i - j."""

    dimension: int
    diagonals: tuple[tuple[Point, CoefficientRule], ...]

    @classmethod
    def from_rules(cls, dimension: int, rules: Mapping) -> "BandDiagonals":
        items = []
        for offset, rule in rules.items():
            if not isinstance(rule, CoefficientRule):
                rule = ConstantRule(complex(rule))
            if not rule.is_trivial():
                items.append((as_point(offset, dimension), rule))
        return cls(dimension, tuple(sorted(items, key=lambda kv: kv[0])))

    @cached_property
    def _lookup(self) -> dict[Point, CoefficientRule]:
        return dict(self.diagonals)

    def entry(self, i, j) -> complex:
        i = as_point(i, self.dimension)
        j = as_point(j, self.dimension)
        rule = self._lookup.get(_sub(i, j))
        return rule.value_at(i) if rule is not None else 0j

    def nonzero_diffs(self) -> frozenset[Point]:
        return frozenset(d for d, _ in self.diagonals)

    def adjoint(self) -> "BandDiagonals":
        rules = {_neg(d): rule.adjoint_shifted(d) for d, rule in self.diagonals}
        return BandDiagonals.from_rules(self.dimension, rules)


def identity_operator(dimension: int = 1) -> BandDiagonals:
    zero = (0,) * dimension
    return BandDiagonals.from_rules(dimension, {zero: ConstantRule(1.0 + 0j)})


@dataclass(frozen=True)
class BlockPeriodic(OperatorSpec):
    """1-D operator assembled from q x q blocks repeating along block diagonals.

    Block t (a block-column offset) couples block row s to block column
    s + t; block row s occupies the q consecutive indices q*s + r + start
    with start = -((q-1)//2), so block row 0 sits at {-1, 0, 1} for q = 3.
    """

    block_size: int
    blocks: tuple[tuple[int, tuple[tuple[complex, ...], ...]], ...]
    dimension: int = field(default=1, init=False)

    @classmethod
    def from_blocks(cls, block_size: int, blocks: Mapping[int, Sequence]) -> "BlockPeriodic":
        q = int(block_size)
        if q < 1:
            raise ValueError("block size must be >= 1")
        items = []
        for t, mat in blocks.items():
            rows = tuple(tuple(complex(v) for v in row) for row in mat)
            if len(rows) != q or any(len(r) != q for r in rows):
                raise ValueError(f"block {t} is not {q}x{q}")
            if any(v != 0 for row in rows for v in row):
                items.append((int(t), rows))
        return cls(q, tuple(sorted(items)))

    @property
    def _start(self) -> int:
        return -((self.block_size - 1) // 2)

    @cached_property
    def _lookup(self) -> dict[int, tuple[tuple[complex, ...], ...]]:
        return dict(self.blocks)

    def _split(self, x: int) -> tuple[int, int]:
        s = (x - self._start) // self.block_size
        return s, x - self.block_size * s - self._start

    def entry(self, i, j) -> complex:
        x = as_point(i, 1)[0]
        y = as_point(j, 1)[0]
        s_row, r = self._split(x)
        s_col, c = self._split(y)
        block = self._lookup.get(s_col - s_row)
        return block[r][c] if block is not None else 0j

    def nonzero_diffs(self) -> frozenset[Point]:
        diffs = set()
        for t, mat in self.blocks:
            for r, row in enumerate(mat):
                for c, v in enumerate(row):
                    if v != 0:
                        diffs.add((r - c - self.block_size * t,))
        return frozenset(diffs)

    def adjoint(self) -> "BlockPeriodic":
        flipped = {}
        for t, mat in self.blocks:
            q = self.block_size
            flipped[-t] = tuple(
                tuple(mat[c][r].conjugate() for c in range(q)) for r in range(q)
            )
        return BlockPeriodic.from_blocks(self.block_size, flipped)


@dataclass(frozen=True)
class AdjacencyGraph(OperatorSpec):
    """Extended adjacency matrix of a graph of pairwise disjoint edges.

    Entry a_{ij} is 1 when {i, j} is an edge or when i = j lies on no
    edge, else 0; the operator swaps edge endpoints and fixes the rest.
    `coverage_radius` marks how far a truncated edge generator is known
    to be complete; entry access beyond it raises UnboundedBandError.
    """

    dimension: int
    edges: tuple[tuple[Point, Point], ...]
    coverage_radius: int | None = None
    family: str = ""

    @classmethod
    def from_edges(
        cls,
        dimension: int,
        edges: Iterable,
        coverage_radius: int | None = None,
        family: str = "",
    ) -> "AdjacencyGraph":
        normalized = []
        for e in edges:
            i, j = (as_point(v, dimension) for v in e)
            if i == j:
                raise ValueError(f"edge {e} is not a doubleton")
            normalized.append((min(i, j), max(i, j)))
        normalized.sort()
        seen: set[Point] = set()
        for i, j in normalized:
            if i in seen or j in seen:
                raise ValueError("edges must be pairwise disjoint doubletons")
            seen.update((i, j))
        return cls(dimension, tuple(normalized), coverage_radius, family)

    @cached_property
    def _partner(self) -> dict[Point, Point]:
        out: dict[Point, Point] = {}
        for i, j in self.edges:
            out[i] = j
            out[j] = i
        return out

    def _check_coverage(self, *points: Point) -> None:
        if self.coverage_radius is None:
            return
        for p in points:
            if _max_norm(p) > self.coverage_radius:
                raise UnboundedBandError(
                    f"point {p} lies beyond the generated edge coverage "
                    f"radius {self.coverage_radius} of family {self.family!r}"
                )

    def entry(self, i, j) -> complex:
        i = as_point(i, self.dimension)
        j = as_point(j, self.dimension)
        self._check_coverage(i, j)
        partner = self._partner.get(i)
        if partner is not None:
            return 1.0 + 0j if partner == j else 0j
        return 1.0 + 0j if i == j else 0j

    def edge_vertices(self) -> list[Point]:
        return sorted(self._partner)

    def nonzero_diffs(self) -> frozenset[Point]:
        diffs = {(0,) * self.dimension}
        for i, j in self.edges:
            diffs.add(_sub(i, j))
            diffs.add(_sub(j, i))
        return frozenset(diffs)

    def adjoint(self) -> "AdjacencyGraph":
        return self  # real symmetric


@dataclass(frozen=True)
class Shift(OperatorSpec):
    """Translation by a fixed lattice vector: a_{ij} = 1 iff j = i - step."""

    dimension: int
    step: Point

    @classmethod
    def by(cls, step, dimension: int = 1) -> "Shift":
        return cls(dimension, as_point(step, dimension))

    def entry(self, i, j) -> complex:
        i = as_point(i, self.dimension)
        j = as_point(j, self.dimension)
        return 1.0 + 0j if _sub(i, j) == self.step else 0j

    def nonzero_diffs(self) -> frozenset[Point]:
        return frozenset({self.step})

    def adjoint(self) -> "Shift":
        return Shift(self.dimension, _neg(self.step))


@dataclass(frozen=True)
class ShiftComposed(OperatorSpec):
    """Shift applied after another operator: entries a_{ij} = inner_{i-step, j}."""

    step: Point
    inner: OperatorSpec

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def entry(self, i, j) -> complex:
        i = as_point(i, self.dimension)
        return self.inner.entry(_sub(i, self.step), j)

    def nonzero_diffs(self) -> frozenset[Point]:
        return frozenset(_add(d, self.step) for d in self.inner.nonzero_diffs())

    def adjoint(self) -> "OperatorSpec":
        # (shift . inner)* = inner* . reverse-shift has no ShiftComposed form;
        # fall back to the lazy transpose wrapper.
        return AdjointSpec(self)


@dataclass(frozen=True)
class AdjointSpec(OperatorSpec):
    """Lazy adjoint: entries conj(base_{ji})."""

    base: OperatorSpec

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def entry(self, i, j) -> complex:
        return complex(self.base.entry(j, i)).conjugate()

    def nonzero_diffs(self) -> frozenset[Point]:
        return frozenset(_neg(d) for d in self.base.nonzero_diffs())

    def adjoint(self) -> OperatorSpec:
        return self.base


def compose_shift(operator: OperatorSpec, step) -> OperatorSpec:
    """Precondition by a shift: the system rows move down by `step`.

    Applied to an equation, the right-hand side must be shifted the same
    way (apply Shift.by(step) to it).
    """
    step = as_point(step, operator.dimension)
    if all(c == 0 for c in step):
        return operator
    return ShiftComposed(step, operator)
