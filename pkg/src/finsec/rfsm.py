"""Rectangular truncations: least-squares solves, a-priori bounds, studies.

The rectangular scheme keeps more rows than columns (m >= n) so the
escaping action of a band operator can be pushed to zero, and solves the
resulting overdetermined window in the minimum-norm least-squares sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import (
    HypothesisViolatedError,
    NoFeasibleMError,
    SingularGramError,
    SingularMatrixError,
)
from .geometry import StarlikeDomain, lattice_section
from .linalg import TAU_REL_DEFAULT, least_squares, solve_square, spectral_norm
from .operators import OperatorSpec, SupportedVector
from .reports import RfsmRecord, RfsmReport
from .sections import assemble, overflow_block, rfsm_section

__all__ = [
    "RfsmParameters",
    "coupling_row_cutoff",
    "overflow_norm",
    "rfsm_solve",
    "solution_bound",
    "choose_parameters",
    "normal_equations_solve",
    "convergence_study",
    "reference_tail_bound",
]

RhsLike = SupportedVector | Callable


@dataclass(frozen=True)
class RfsmParameters:
    """Chosen precision and cut-offs for one rectangular solve."""

    epsilon: float
    delta: float
    n: int
    m: int
    coupling: str = "explicit"

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.n < 1 or self.m < 1:
            raise ValueError("cut-offs must be >= 1")


def coupling_row_cutoff(
    coupling: str, n: int, band_width: int, explicit: dict[int, int] | None = None
) -> int:
    """Row cut-off m for column cut-off n under a named coupling rule."""
    if coupling == "band":
        return n + band_width
    if coupling == "sixfifths":
        return math.ceil(6 * n / 5)
    if coupling == "explicit":
        if explicit is None or n not in explicit:
            raise ValueError(f"explicit coupling has no row cut-off for n={n}")
        return explicit[n]
    raise ValueError(f"unknown coupling rule {coupling!r}")


def overflow_norm(
    operator: OperatorSpec, domain: StarlikeDomain, m: int, n: int
) -> float:
    """Exact spectral norm of the action on window-n columns escaping window m."""
    block = overflow_block(operator, domain, m, n)
    return spectral_norm(block.data)


def rfsm_solve(
    operator: OperatorSpec,
    rhs: SupportedVector,
    domain: StarlikeDomain,
    m: int,
    n: int,
) -> SupportedVector:
    """Minimum-norm least-squares solution of the rectangular window system."""
    section = rfsm_section(operator, domain, m, n)
    b = rhs.restrict(section.rows).to_array(section.rows)
    x = least_squares(section.data, b)
    return SupportedVector.from_array(section.cols, x)


def solution_bound(
    inverse_bound: float, rhs_norm: float, delta: float, overflow: float
) -> float:
    """A-priori norm bound (rhs_norm + delta) / (1/inverse_bound - overflow).

    Requires the overflow norm to sit strictly below 1/inverse_bound.
    """
    gap = 1.0 / inverse_bound - overflow
    if gap <= 0:
        raise HypothesisViolatedError(
            f"overflow norm {overflow:g} is not below 1/inverse_bound={1.0 / inverse_bound:g}"
        )
    return (rhs_norm + delta) / gap


def reference_tail_bound(
    u_ref: SupportedVector, domain: StarlikeDomain, slack: float = 2.0
) -> Callable[[int], float]:
    """Tail bound surrogate n -> slack * norm of the reference solution off window n.

    The exact tail of the true solution is not finitely computable; a
    high-accuracy reference solve plus a slack factor is the transparent
    stand-in.  Monotone non-increasing by construction.
    """

    def bound(n: int) -> float:
        return slack * u_ref.restrict_outside(lattice_section(domain, n)).norm()

    return bound


def choose_parameters(
    operator: OperatorSpec,
    rhs: SupportedVector,
    domain: StarlikeDomain,
    epsilon: float,
    operator_norm: float,
    inverse_bound: float,
    tail_bound: Callable[[int], float],
    n_limit: int = 256,
    m_limit: int = 1024,
) -> RfsmParameters:
    """Pick (delta, n, m) guaranteeing the solve lands within epsilon of the truth.

    delta is half of epsilon / (3 * inverse_bound); n is the smallest
    column cut-off whose solution tail clears delta / operator_norm; m is
    the smallest row cut-off >= n with a small enough right-hand-side tail
    and an overflow norm below the convergence threshold.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    delta = epsilon / (3.0 * inverse_bound) / 2.0

    n = next(
        (k for k in range(1, n_limit + 1) if tail_bound(k) <= delta / operator_norm),
        None,
    )
    if n is None:
        raise NoFeasibleMError(
            f"no column cut-off below {n_limit} clears the solution tail bound"
        )

    rhs_norm = rhs.norm()
    rhs_tail_cap = epsilon / (3.0 * inverse_bound)
    overflow_cap = (1.0 / inverse_bound) * (
        1.0 - 1.0 / (1.0 + epsilon / (3.0 * (rhs_norm + delta) * inverse_bound))
    )
    for m in range(n, m_limit + 1):
        tail = rhs.restrict_outside(lattice_section(domain, m)).norm()
        if tail < rhs_tail_cap and overflow_norm(operator, domain, m, n) < overflow_cap:
            return RfsmParameters(epsilon=epsilon, delta=delta, n=n, m=m)
    raise NoFeasibleMError(
        f"no row cut-off below {m_limit} satisfies the tail and overflow bounds"
    )


def normal_equations_solve(
    operator: OperatorSpec,
    rhs: SupportedVector,
    domain: StarlikeDomain,
    m: int,
    n: int,
    tau_rel: float = TAU_REL_DEFAULT,
) -> SupportedVector:
    """Solve the window normal equations; equals the least-squares route when Gram is regular."""
    rows = lattice_section(domain, m)
    cols = lattice_section(domain, n)
    forward = assemble(operator, rows, cols)
    backward = assemble(operator.adjoint(), cols, rows)
    gram = backward.data @ forward.data
    b = backward.data @ rhs.restrict(rows).to_array(rows)
    try:
        x = solve_square(gram, b, tau_rel)
    except SingularMatrixError as exc:
        raise SingularGramError(f"normal equations at (m={m}, n={n}): {exc}") from exc
    return SupportedVector.from_array(cols, x)


def _materialize_rhs(rhs: RhsLike, domain: StarlikeDomain, m: int) -> SupportedVector:
    if isinstance(rhs, SupportedVector):
        return rhs
    return rhs(lattice_section(domain, m))


def convergence_study(
    operator: OperatorSpec,
    rhs: RhsLike,
    domain: StarlikeDomain,
    coupling: str,
    n_values: Iterable[int],
    reference_n: int,
    explicit_rows: dict[int, int] | None = None,
    inverse_bound: float | None = None,
    certified_bound: Callable[[int], float] | None = None,
    operator_id: str = "",
    domain_id: str = "",
) -> RfsmReport:
    """Run rectangular solves over n_values and compare against a large reference solve.

    The reference solution is computed at (reference_n + band width,
    reference_n) and stands in for the exact solution; reference_n must
    dominate every requested n.  When inverse_bound is given the a-priori
    norm bound is recorded wherever its hypothesis holds;
    certified_bound(n), when given, fills the certified error column.
    """
    ns = sorted(set(int(n) for n in n_values))
    if not ns:
        raise ValueError("empty n list")
    width = operator.band_width()
    if reference_n <= max(ns):
        raise ValueError("reference_n must exceed every requested n")

    couplings = {
        n: coupling_row_cutoff(coupling, n, width, explicit_rows) for n in ns
    }
    m_ref = reference_n + width
    rhs_vec = _materialize_rhs(rhs, domain, max([m_ref, *couplings.values()]))
    u_ref = rfsm_solve(operator, rhs_vec, domain, m_ref, reference_n)

    records = []
    rhs_norm = rhs_vec.norm()
    for n in ns:
        m = couplings[n]
        section = rfsm_section(operator, domain, m, n)
        b = rhs_vec.restrict(section.rows).to_array(section.rows)
        x = least_squares(section.data, b)
        u = SupportedVector.from_array(section.cols, x)
        residual = float(np.linalg.norm(section.data @ x - b))
        bound = None
        if inverse_bound is not None:
            overflow = overflow_norm(operator, domain, m, n)
            if overflow < 1.0 / inverse_bound:
                bound = solution_bound(inverse_bound, rhs_norm, residual, overflow)
        records.append(
            RfsmRecord(
                n=n,
                m=m,
                residual=residual,
                solution_norm=u.norm(),
                solution_bound=bound,
                error=(u - u_ref).norm(),
                certified_bound=certified_bound(n) if certified_bound else None,
            )
        )
    return RfsmReport(
        operator_id=operator_id or type(operator).__name__,
        domain_id=domain_id or domain.name or "domain",
        coupling=coupling,
        reference_n=reference_n,
        records=tuple(records),
    )
