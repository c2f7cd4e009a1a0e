"""Square finite sections: solves, inverse-norm scans, subsequence verdicts.

The inverse norm of a section is max(1, 1/sigma_min), the operator norm of
the inverted section extended by the identity off the window.  For
adjacency operators the section splits exactly into the identity plus a
small block over edge-touched vertices, so scans stay dense-small even
when the window holds tens of thousands of lattice points.
"""

from __future__ import annotations

from typing import Iterable

from .errors import (
    GeneratorBoundError,
    InsufficientDataError,
    SingularMatrixError,
    SingularSectionError,
)
from .geometry import IndexSet, StarlikeDomain, lattice_section_size
from .linalg import (
    NORM_CAP_DEFAULT,
    TAU_REL_DEFAULT,
    singular_values,
    solve_square,
)
from .operators import AdjacencyGraph, OperatorSpec, SupportedVector
from .reports import StabilityRecord, StabilityReport
from .sections import assemble, fsm_section

__all__ = [
    "VERDICT_STABLE",
    "VERDICT_SINGULAR",
    "VERDICT_NORM_CAP",
    "fsm_solve",
    "inverse_norm",
    "section_extremes",
    "stability_scan",
    "adjacency_section_invertible",
    "classify_subsequences",
]

VERDICT_STABLE = "stable-so-far"
VERDICT_SINGULAR = "contains-singular"
VERDICT_NORM_CAP = "norm-exceeds-cap"


def _check_adjacency_coverage(
    graph: AdjacencyGraph, domain: StarlikeDomain, n: int
) -> None:
    if graph.coverage_radius is None:
        return
    needed = domain.enclosing_radius(n)
    if needed > graph.coverage_radius:
        raise GeneratorBoundError(
            f"window n={n} needs edges complete up to max-norm radius {needed}, "
            f"but the generator covers only {graph.coverage_radius}"
        )


def _adjacency_extremes(
    graph: AdjacencyGraph, domain: StarlikeDomain, n: int
) -> tuple[float, float]:
    """Exact (sigma_min, sigma_max) of the square section of an adjacency operator.

    The section is the identity on window points that touch no edge, plus
    the assembled block over edge-touched points, so its singular values
    are those of the block together with 1.
    """
    _check_adjacency_coverage(graph, domain, n)
    active = [p for p in graph.edge_vertices() if domain.contains(p, n)]
    window_size = lattice_section_size(domain, n)
    if not active:
        return 1.0, 1.0
    block_set = IndexSet.from_points(graph.dimension, active)
    sv = singular_values(assemble(graph, block_set, block_set).data)
    smin = float(sv[-1])
    smax = float(sv[0])
    if window_size > len(active):  # identity part is present
        smin = min(smin, 1.0)
        smax = max(smax, 1.0)
    return smin, smax


def section_extremes(
    operator: OperatorSpec, domain: StarlikeDomain, n: int
) -> tuple[float, float]:
    """(sigma_min, sigma_max) of the square section over window n."""
    if isinstance(operator, AdjacencyGraph):
        return _adjacency_extremes(operator, domain, n)
    sv = singular_values(fsm_section(operator, domain, n).data)
    return float(sv[-1]), float(sv[0])


def _invertible(smin: float, smax: float, tau_rel: float) -> bool:
    return smin > tau_rel * max(smax, 1.0)


def fsm_solve(
    operator: OperatorSpec,
    rhs: SupportedVector,
    domain: StarlikeDomain,
    n: int,
    tau_rel: float = TAU_REL_DEFAULT,
) -> SupportedVector:
    """Solve the square truncated system over window n; zero off the window."""
    section = fsm_section(operator, domain, n)
    b = rhs.restrict(section.rows).to_array(section.rows)
    try:
        x = solve_square(section.data, b, tau_rel)
    except SingularMatrixError as exc:
        raise SingularSectionError(f"section at n={n} is singular: {exc}") from exc
    return SupportedVector.from_array(section.cols, x)


def inverse_norm(
    operator: OperatorSpec,
    domain: StarlikeDomain,
    n: int,
    tau_rel: float = TAU_REL_DEFAULT,
) -> float:
    """max(1, 1/sigma_min) of the section; raises when the section is singular."""
    smin, smax = section_extremes(operator, domain, n)
    if not _invertible(smin, smax, tau_rel):
        raise SingularSectionError(f"section at n={n} fails the invertibility test")
    return max(1.0, 1.0 / smin)


def stability_scan(
    operator: OperatorSpec,
    domain: StarlikeDomain,
    n_values: Iterable[int],
    tau_rel: float = TAU_REL_DEFAULT,
    operator_id: str = "",
    domain_id: str = "",
) -> StabilityReport:
    """Record invertibility and inverse norms over increasing window cut-offs."""
    ns = list(n_values)
    if not ns:
        raise ValueError("empty n list")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n values must be strictly increasing")
    records = []
    for n in ns:
        smin, smax = section_extremes(operator, domain, n)
        ok = _invertible(smin, smax, tau_rel)
        records.append(
            StabilityRecord(
                n=n,
                invertible=ok,
                inverse_norm=max(1.0, 1.0 / smin) if ok else None,
                sigma_min=smin,
                sigma_max=smax,
            )
        )
    return StabilityReport(
        operator_id=operator_id or type(operator).__name__,
        domain_id=domain_id or domain.name or "domain",
        tau_rel=tau_rel,
        records=tuple(records),
    )


def adjacency_section_invertible(
    graph: AdjacencyGraph, domain: StarlikeDomain, n: int
) -> bool:
    """Exact arithmetic criterion: no edge may have exactly one endpoint inside."""
    if not isinstance(graph, AdjacencyGraph):
        raise TypeError("criterion applies to adjacency operators only")
    _check_adjacency_coverage(graph, domain, n)
    for i, j in graph.edges:
        if domain.contains(i, n) != domain.contains(j, n):
            return False
    return True


def classify_subsequences(
    report: StabilityReport,
    modulus: int,
    norm_cap: float = NORM_CAP_DEFAULT,
) -> dict[int, str]:
    """Per-residue verdict over the scanned cut-offs.

    A class is 'stable-so-far' when every scanned section in it is
    invertible with inverse norm at most norm_cap; the verdict is honest
    about being finite evidence only.
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    buckets: dict[int, list[StabilityRecord]] = {r: [] for r in range(modulus)}
    for rec in report.records:
        buckets[rec.n % modulus].append(rec)
    short = [r for r, recs in buckets.items() if len(recs) < 3]
    if short:
        raise InsufficientDataError(
            f"residue classes {short} mod {modulus} scanned fewer than 3 times"
        )
    verdicts: dict[int, str] = {}
    for residue, recs in buckets.items():
        if any(not rec.invertible for rec in recs):
            verdicts[residue] = VERDICT_SINGULAR
        elif any(rec.inverse_norm > norm_cap for rec in recs):
            verdicts[residue] = VERDICT_NORM_CAP
        else:
            verdicts[residue] = VERDICT_STABLE
    return verdicts
