"""Command-line harness: scans, solves and convergence studies with CSV/JSON reports.

Configs are JSON files; exact rationals are "p/q" strings, complex scalars
are "re" or "re+imi" strings.  Outputs are byte-deterministic for a fixed
config.  Exit status: 0 success, 2 invalid configuration, 3 numeric
failure (singular section, infeasible parameters, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .catalog import (
    EXAMPLE_IDS,
    BUILTIN_DOMAINS,
    ExampleCase,
    build_example,
    builtin_domain,
    expected_outcomes,
    minimal_bound,
)
from .errors import (
    GeneratorBoundError,
    HypothesisViolatedError,
    InsufficientDataError,
    NoFeasibleMError,
    OpenFacetError,
    SingularGramError,
    SingularMatrixError,
    SingularSectionError,
    UnboundedBandError,
    UnboundedDomainError,
    UnknownExampleError,
    ZeroNotInteriorError,
)
from .fsm import classify_subsequences, fsm_solve, stability_scan
from .geometry import StarlikeDomain, lattice_section, validate_domain
from .linalg import NORM_CAP_DEFAULT, TAU_REL_DEFAULT
from .operators import (
    AdjacencyGraph,
    BandDiagonals,
    BlockPeriodic,
    ConstantRule,
    OperatorSpec,
    PeriodicRule,
    Shift,
    ShiftComposed,
    SupportedVector,
    TableRule,
)
from .reports import (
    rfsm_report_csv,
    rfsm_report_json,
    stability_report_csv,
    stability_report_json,
)
from .rfsm import (
    choose_parameters,
    convergence_study,
    reference_tail_bound,
    rfsm_solve,
)
from .sections import rfsm_section

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_CONFIG_ERRORS = (
    ValueError,
    KeyError,
    OSError,
    json.JSONDecodeError,
    ZeroDivisionError,
    ZeroNotInteriorError,
    UnboundedDomainError,
    OpenFacetError,
    UnknownExampleError,
    InsufficientDataError,
    GeneratorBoundError,
)
_NUMERIC_ERRORS = (
    SingularSectionError,
    SingularMatrixError,
    SingularGramError,
    HypothesisViolatedError,
    NoFeasibleMError,
    UnboundedBandError,
)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def parse_scalar(value) -> complex:
    """Parse a complex scalar given as a number, "re", "p/q" or "re+imi"."""
    if isinstance(value, (int, float)):
        return complex(value)
    s = str(value).strip().replace(" ", "")
    if re.fullmatch(r"[+-]?\d+/\d+", s):
        return complex(Fraction(s))
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ValueError(f"cannot parse scalar {value!r}") from None


def _parse_point_key(key: str, dimension: int) -> tuple[int, ...]:
    parts = str(key).split(";")
    if len(parts) != dimension:
        raise ValueError(f"point key {key!r} does not have dimension {dimension}")
    return tuple(int(p) for p in parts)


def load_domain(source: str) -> StarlikeDomain:
    """A builtin domain name or a path to a domain JSON config."""
    if source in BUILTIN_DOMAINS:
        return builtin_domain(source)
    payload = json.loads(Path(source).read_text())
    name = payload.get("name", Path(source).stem)
    if "vertices" in payload:
        return validate_domain(
            vertices=payload["vertices"],
            dimension=payload.get("dimension"),
            name=name,
        )
    facets = [
        (f["normal"], f["offset"], f.get("closed", True)) for f in payload["facets"]
    ]
    return validate_domain(facets=facets, dimension=payload.get("dimension"), name=name)


def _parse_rule(payload: dict, dimension: int):
    kind = payload["kind"]
    if kind == "constant":
        return ConstantRule(parse_scalar(payload["value"]))
    if kind == "periodic":
        table = {
            _parse_point_key(k, dimension): parse_scalar(v)
            for k, v in payload["table"].items()
        }
        return PeriodicRule.from_mapping(payload["period"], table)
    if kind == "table":
        entries = {
            _parse_point_key(k, dimension): parse_scalar(v)
            for k, v in payload["entries"].items()
        }
        return TableRule.from_mapping(
            entries, parse_scalar(payload.get("default", 0)), dimension
        )
    raise ValueError(f"unknown coefficient rule kind {kind!r}")


def parse_operator(payload: dict) -> OperatorSpec:
    variant = payload["variant"]
    if variant == "band_diagonals":
        dim = int(payload.get("dimension", 1))
        rules = {
            tuple(d["offset"]): _parse_rule(d["rule"], dim)
            for d in payload["diagonals"]
        }
        return BandDiagonals.from_rules(dim, rules)
    if variant == "block_periodic":
        blocks = {
            int(t): [[parse_scalar(v) for v in row] for row in mat]
            for t, mat in payload["blocks"].items()
        }
        return BlockPeriodic.from_blocks(int(payload["block_size"]), blocks)
    if variant == "adjacency":
        dim = int(payload.get("dimension", 1))
        if "generator" in payload:
            case = build_example(payload["generator"], int(payload.get("bound", 40)))
            if not isinstance(case.operator, AdjacencyGraph):
                raise ValueError(f"example {payload['generator']!r} is not adjacency")
            return case.operator
        return AdjacencyGraph.from_edges(dim, payload["edges"])
    if variant == "shift":
        dim = int(payload.get("dimension", 1))
        return Shift(dim, tuple(int(c) for c in payload["step"]))
    if variant == "shift_composed":
        inner = parse_operator(payload["inner"])
        return ShiftComposed(
            tuple(int(c) for c in payload["step"]), inner
        )
    raise ValueError(f"unknown operator variant {variant!r}")


def load_operator(source: str) -> OperatorSpec:
    return parse_operator(json.loads(Path(source).read_text()))


def load_rhs(source: str) -> SupportedVector:
    payload = json.loads(Path(source).read_text())
    dim = int(payload.get("dimension", 1))
    entries = {
        _parse_point_key(k, dim): parse_scalar(v)
        for k, v in payload["entries"].items()
    }
    return SupportedVector.from_entries(dim, entries)


# ---------------------------------------------------------------------------
# shared option handling
# ---------------------------------------------------------------------------


def _resolve_case(args) -> tuple[OperatorSpec, StarlikeDomain, ExampleCase | None, str]:
    """Operator + domain from --example or --operator/--omega flags."""
    if getattr(args, "example", None):
        bound = getattr(args, "bound", None)
        if bound is None:
            n_max = getattr(args, "nmax", None) or getattr(args, "n", None) or 40
            probe = builtin_domain("square") if args.example in (
                "rarosi",
                "sierror",
                "diamond",
            ) else builtin_domain("interval")
            bound = minimal_bound(args.example, probe.enclosing_radius(int(n_max)))
        case = build_example(args.example, bound)
        domain = load_domain(args.omega) if getattr(args, "omega", None) else case.domain
        return case.operator, domain, case, args.example
    if not getattr(args, "operator", None):
        raise ValueError("provide --example or --operator")
    operator = load_operator(args.operator)
    omega = getattr(args, "omega", None)
    if not omega:
        raise ValueError("--omega is required with --operator")
    return operator, load_domain(omega), None, Path(args.operator).stem


def _resolve_rhs(args, case: ExampleCase | None, domain, radius: int) -> SupportedVector:
    if getattr(args, "rhs", None):
        return load_rhs(args.rhs)
    if case is not None and case.rhs is not None:
        return case.rhs(lattice_section(domain, radius))
    raise ValueError("provide --rhs (the selected source has no built-in right-hand side)")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _solution_csv(u: SupportedVector) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["point", "real", "imag"])
    for p in u.support():
        v = u.entries[p]
        writer.writerow(
            [";".join(str(c) for c in p), f"{v.real:.17g}", f"{v.imag:.17g}"]
        )
    return buf.getvalue()


def _solution_json(u: SupportedVector, meta: dict) -> str:
    payload = {
        "kind": "solution",
        "entries": {
            ";".join(str(c) for c in p): [u.entries[p].real, u.entries[p].imag]
            for p in u.support()
        },
    }
    payload.update(meta)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_scan(args) -> int:
    operator, domain, case, op_id = _resolve_case(args)
    report = stability_scan(
        operator,
        domain,
        range(args.nmin, args.nmax + 1),
        tau_rel=args.tau_rel,
        operator_id=op_id,
        domain_id=domain.name,
    )
    explicit_moduli = args.modulus is not None
    moduli = args.modulus if explicit_moduli else [1, 2, 3]
    classification = {}
    for mod in moduli:
        try:
            verdicts = classify_subsequences(report, mod, norm_cap=args.norm_cap)
        except InsufficientDataError:
            if explicit_moduli:
                raise
            continue  # default moduli are classified only when covered
        classification[str(mod)] = {
            str(res): verdict for res, verdict in verdicts.items()
        }
    report = type(report)(
        operator_id=report.operator_id,
        domain_id=report.domain_id,
        tau_rel=report.tau_rel,
        records=report.records,
        classification=classification,
    )
    if args.format == "csv":
        _emit(stability_report_csv(report), args.out)
    else:
        _emit(stability_report_json(report), args.out)
    return EXIT_OK


def _cmd_example(args) -> int:
    bound = args.bound
    if bound is None:
        case_probe = build_example(args.case_id, 1)
        bound = minimal_bound(
            args.case_id, case_probe.domain.enclosing_radius(args.nmax)
        )
    case = build_example(args.case_id, bound)
    report = stability_scan(
        case.operator,
        case.domain,
        range(args.nmin, args.nmax + 1),
        tau_rel=args.tau_rel,
        operator_id=case.case_id,
        domain_id=case.domain.name,
    )
    if args.format == "csv":
        _emit(stability_report_csv(report), args.out)
        return EXIT_OK
    checks = expected_outcomes(case, args.nmax)
    extra = {
        "bound": bound,
        "expectations": [
            {"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks
        ],
    }
    _emit(stability_report_json(report, extra=extra), args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


def _cmd_solve_fsm(args) -> int:
    operator, domain, case, _ = _resolve_case(args)
    rhs = _resolve_rhs(args, case, domain, args.n)
    u = fsm_solve(operator, rhs, domain, args.n, tau_rel=args.tau_rel)
    if args.format == "csv":
        _emit(_solution_csv(u), args.out)
    else:
        _emit(_solution_json(u, {"n": args.n}), args.out)
    return EXIT_OK


def _cmd_solve_rfsm(args) -> int:
    operator, domain, case, _ = _resolve_case(args)
    if args.n is not None and args.m is not None:
        n, m = args.n, args.m
        delta = args.delta
        rhs = _resolve_rhs(args, case, domain, m)
    elif args.epsilon is not None:
        a_norm = args.a_norm or (case.operator_norm if case else None)
        a_inv = args.a_inv_norm or (case.inverse_bound if case else None)
        if a_norm is None or a_inv is None:
            raise ValueError(
                "--epsilon needs certified --a-norm and --a-inv-norm "
                "(built in only for worked_A)"
            )
        reference_n = args.reference_n
        rhs = _resolve_rhs(args, case, domain, reference_n + operator.band_width())
        u_ref = rfsm_solve(
            operator, rhs, domain, reference_n + operator.band_width(), reference_n
        )
        params = choose_parameters(
            operator,
            rhs,
            domain,
            args.epsilon,
            a_norm,
            a_inv,
            reference_tail_bound(u_ref, domain),
        )
        n, m, delta = params.n, params.m, params.delta
    else:
        raise ValueError("provide --n and --m, or --epsilon")

    section = rfsm_section(operator, domain, m, n)
    b = rhs.restrict(section.rows).to_array(section.rows)
    from .linalg import least_squares

    x = least_squares(section.data, b)
    import numpy as np

    residual = float(np.linalg.norm(section.data @ x - b))
    u = SupportedVector.from_array(section.cols, x)
    if delta is not None and residual >= delta:
        raise NoFeasibleMError(
            f"least-squares residual {residual:.6g} does not meet delta={delta:.6g}"
        )
    if args.format == "csv":
        _emit(_solution_csv(u), args.out)
    else:
        meta = {"n": n, "m": m, "residual": residual}
        if delta is not None:
            meta["delta"] = delta
        _emit(_solution_json(u, meta), args.out)
    return EXIT_OK


def _parse_coupling(text: str, nmin: int, nmax: int):
    if text in ("band", "sixfifths"):
        return text, None
    if text.startswith("explicit:"):
        values = [int(v) for v in text.split(":", 1)[1].split(",") if v]
        ns = list(range(nmin, nmax + 1))
        if len(values) != len(ns):
            raise ValueError(
                f"explicit coupling needs {len(ns)} row cut-offs, got {len(values)}"
            )
        return "explicit", dict(zip(ns, values))
    raise ValueError(f"unknown coupling {text!r}")


def _cmd_study(args) -> int:
    operator, domain, case, op_id = _resolve_case(args)
    coupling, explicit = _parse_coupling(args.coupling, args.nmin, args.nmax)
    width = operator.band_width()
    max_m = args.reference_n + width
    if explicit:
        max_m = max(max_m, *explicit.values())
    rhs = _resolve_rhs(args, case, domain, max_m)
    certified = None
    if case is not None and coupling == "band":
        certified = case.band_error_bound
    report = convergence_study(
        operator,
        rhs,
        domain,
        coupling,
        range(args.nmin, args.nmax + 1),
        args.reference_n,
        explicit_rows=explicit,
        inverse_bound=args.a_inv_norm
        or (case.inverse_bound if case else None),
        certified_bound=certified,
        operator_id=op_id,
        domain_id=domain.name,
    )
    if args.format == "csv":
        _emit(rfsm_report_csv(report), args.out)
    else:
        _emit(rfsm_report_json(report), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--operator", help="operator config JSON path")
    p.add_argument("--omega", help="domain: builtin name or config JSON path")
    p.add_argument("--example", choices=EXAMPLE_IDS, help="built-in case id")
    p.add_argument("--bound", type=int, help="edge generator bound K")
    p.add_argument("--rhs", help="right-hand side config JSON path")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--tau-rel", type=float, default=TAU_REL_DEFAULT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finsec",
        description="Finite section scans and rectangular truncated solves "
        "for band operators on integer lattices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="invertibility / inverse-norm scan over windows")
    _add_source_flags(p)
    _add_output_flags(p)
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--modulus", type=int, action="append", default=None)
    p.add_argument("--norm-cap", type=float, default=NORM_CAP_DEFAULT)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("example", help="scan a built-in case and check its expectations")
    p.add_argument("case_id", choices=EXAMPLE_IDS)
    _add_output_flags(p)
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, default=40)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("solve-fsm", help="solve one square truncated system")
    _add_source_flags(p)
    _add_output_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_solve_fsm)

    p = sub.add_parser("solve-rfsm", help="solve one rectangular system by least squares")
    _add_source_flags(p)
    _add_output_flags(p)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--delta", type=float, help="required residual precision")
    p.add_argument("--epsilon", type=float, help="target accuracy; picks delta, n, m")
    p.add_argument("--a-norm", type=float, help="certified operator norm bound")
    p.add_argument("--a-inv-norm", type=float, help="certified inverse norm bound")
    p.add_argument("--reference-n", type=int, default=64)
    p.set_defaults(func=_cmd_solve_rfsm)

    p = sub.add_parser("study", help="convergence study against a reference solve")
    _add_source_flags(p)
    _add_output_flags(p)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument(
        "--coupling",
        default="band",
        help="band | sixfifths | explicit:M1,M2,... (one per n)",
    )
    p.add_argument("--reference-n", type=int, default=64)
    p.add_argument("--a-inv-norm", type=float, default=None)
    p.set_defaults(func=_cmd_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"finsec: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _CONFIG_ERRORS as exc:
        print(f"finsec: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
