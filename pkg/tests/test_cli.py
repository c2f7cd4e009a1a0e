import json

import pytest

from finsec.cli import main, parse_scalar
from finsec.reports import parse_stability_report_json


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# scalar / config parsing
# ---------------------------------------------------------------------------


def test_parse_scalar_forms():
    assert parse_scalar("1") == 1
    assert parse_scalar("-2.5") == -2.5
    assert parse_scalar("3/4") == 0.75
    assert parse_scalar("1+2i") == 1 + 2j
    assert parse_scalar("-1.5-0.5i") == -1.5 - 0.5j
    assert parse_scalar(2) == 2
    with pytest.raises(ValueError):
        parse_scalar("wat")


# ---------------------------------------------------------------------------
# example command
# ---------------------------------------------------------------------------


def test_example_sierror_csv_squares(capsys):
    code, out, _ = run_cli(
        ["example", "sierror", "--nmax", "100", "--format", "csv"], capsys
    )
    assert code == 0
    rows = out.splitlines()[1:]
    non_invertible = [
        int(r.split(",")[0]) for r in rows if r.split(",")[1] == "false"
    ]
    assert non_invertible == [k * k for k in range(1, 11)]


def test_example_json_reports_expectations(capsys):
    code, out, _ = run_cli(
        ["example", "blockdiag", "--nmax", "20", "--format", "json"], capsys
    )
    assert code == 0
    payload = json.loads(out)
    names = {e["name"] for e in payload["expectations"]}
    assert names == {"invertible-iff-even", "even-inverse-norm-one"}
    assert all(e["passed"] for e in payload["expectations"])


def test_example_autosizes_generator_bound(capsys):
    code, out, _ = run_cli(
        ["example", "diamond", "--nmax", "60", "--format", "json"], capsys
    )
    assert code == 0
    assert json.loads(out)["bound"] >= 60


# ---------------------------------------------------------------------------
# scan command
# ---------------------------------------------------------------------------


def test_scan_identity_spec_from_config(tmp_path, capsys):
    op = tmp_path / "op.json"
    op.write_text(
        json.dumps(
            {
                "variant": "band_diagonals",
                "dimension": 1,
                "diagonals": [
                    {"offset": [0], "rule": {"kind": "constant", "value": "1"}}
                ],
            }
        )
    )
    code, out, _ = run_cli(
        [
            "scan",
            "--operator",
            str(op),
            "--omega",
            "interval",
            "--nmax",
            "8",
            "--format",
            "csv",
        ],
        capsys,
    )
    assert code == 0
    rows = out.splitlines()[1:]
    assert all(r.split(",")[1] == "true" and r.split(",")[2] == "1" for r in rows)


def test_scan_classification_and_roundtrip(capsys):
    code, out, _ = run_cli(
        [
            "scan",
            "--example",
            "worked_Aprime",
            "--nmax",
            "24",
            "--modulus",
            "3",
            "--format",
            "json",
        ],
        capsys,
    )
    assert code == 0
    report = parse_stability_report_json(out)
    assert report.classification["3"]["1"] == "stable-so-far"
    assert report.classification["3"]["0"] == "contains-singular"
    assert report.classification["3"]["2"] == "contains-singular"


def test_scan_determinism(tmp_path, capsys):
    args = ["scan", "--example", "sierror", "--nmax", "50", "--format", "json"]
    _, first, _ = run_cli(args, capsys)
    _, second, _ = run_cli(args, capsys)
    assert first == second


def test_scan_writes_output_file(tmp_path, capsys):
    out_path = tmp_path / "report.csv"
    code, out, _ = run_cli(
        ["scan", "--example", "shift", "--nmax", "6", "--out", str(out_path)], capsys
    )
    assert code == 0
    assert out == ""
    assert out_path.read_text().splitlines()[0].startswith("n,invertible")


def test_scan_rejects_missing_source(capsys):
    code, _, err = run_cli(["scan", "--nmax", "5"], capsys)
    assert code == 2
    assert "invalid configuration" in err


def test_scan_domain_config_file(tmp_path, capsys):
    omega = tmp_path / "omega.json"
    omega.write_text(
        json.dumps(
            {
                "dimension": 1,
                "facets": [
                    {"normal": ["1"], "offset": "2"},
                    {"normal": ["-1"], "offset": "1/1"},
                ],
            }
        )
    )
    op = tmp_path / "shift.json"
    op.write_text(json.dumps({"variant": "shift", "dimension": 1, "step": [1]}))
    code, out, _ = run_cli(
        ["scan", "--operator", str(op), "--omega", str(omega), "--nmax", "4"],
        capsys,
    )
    assert code == 0
    assert all(r.split(",")[1] == "false" for r in out.splitlines()[1:])


def test_all_operator_variants_parse(tmp_path, capsys):
    block = {
        "variant": "block_periodic",
        "block_size": 3,
        "blocks": {
            "0": [["1", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
            "1": [["0", "0", "0"], ["0", "0", "0"], ["1", "1", "1"]],
        },
    }
    composed = {"variant": "shift_composed", "step": [1], "inner": block}
    adjacency = {"variant": "adjacency", "dimension": 1, "edges": [[[1], [2]], [[-2], [-1]]]}
    generated = {"variant": "adjacency", "generator": "sierror", "bound": 6}
    for idx, (payload, omega, nmax) in enumerate(
        [
            (block, "interval", 6),
            (composed, "interval", 6),
            (adjacency, "interval", 6),
            (generated, "square", 6),
        ]
    ):
        op = tmp_path / f"op{idx}.json"
        op.write_text(json.dumps(payload))
        code, out, err = run_cli(
            ["scan", "--operator", str(op), "--omega", omega, "--nmax", str(nmax)],
            capsys,
        )
        assert code == 0, err
        assert len(out.splitlines()) == nmax + 1
    # the composed spec matches the built-in preconditioned case: 1 mod 3 stable
    op = tmp_path / "op1.json"
    code, out, _ = run_cli(
        ["scan", "--operator", str(op), "--omega", "interval", "--nmax", "9"],
        capsys,
    )
    flags = [row.split(",")[1] for row in out.splitlines()[1:]]
    assert flags == ["true", "false", "false"] * 3


def test_vertex_domain_config(tmp_path, capsys):
    omega = tmp_path / "triangle.json"
    omega.write_text(json.dumps({"vertices": [["0", "2"], ["2", "-2"], ["-2", "-2"]]}))
    op = tmp_path / "gen.json"
    op.write_text(json.dumps({"variant": "adjacency", "generator": "diamond", "bound": 30}))
    code, out, _ = run_cli(
        ["scan", "--operator", str(op), "--omega", str(omega), "--nmax", "8"],
        capsys,
    )
    assert code == 0
    # the triangle window keeps both endpoints of every diagonal edge together
    assert all(r.split(",")[1] == "true" for r in out.splitlines()[1:])


def test_bad_domain_exits_2(tmp_path, capsys):
    omega = tmp_path / "omega.json"
    omega.write_text(
        json.dumps({"dimension": 1, "facets": [{"normal": ["1"], "offset": "1"}]})
    )
    op = tmp_path / "shift.json"
    op.write_text(json.dumps({"variant": "shift", "dimension": 1, "step": [1]}))
    code, _, err = run_cli(
        ["scan", "--operator", str(op), "--omega", str(omega), "--nmax", "4"],
        capsys,
    )
    assert code == 2
    assert "positively span" in err


# ---------------------------------------------------------------------------
# solve commands
# ---------------------------------------------------------------------------


def test_solve_fsm_singular_exits_3(capsys):
    code, _, err = run_cli(
        ["solve-fsm", "--example", "shift", "--n", "5", "--rhs", "/nonexistent"],
        capsys,
    )
    assert code == 2  # missing rhs file is a config problem

    rhs_args = ["solve-fsm", "--example", "worked_A", "--n", "4"]
    code, _, err = run_cli(rhs_args, capsys)
    assert code == 3
    assert "singular" in err.lower()


def test_solve_fsm_blockdiag(tmp_path, capsys):
    rhs = tmp_path / "rhs.json"
    rhs.write_text(json.dumps({"dimension": 1, "entries": {"1": "1"}}))
    code, out, _ = run_cli(
        [
            "solve-fsm",
            "--example",
            "blockdiag",
            "--n",
            "4",
            "--rhs",
            str(rhs),
            "--format",
            "json",
        ],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["entries"] == {"2": [1.0, 0.0]}


def test_solve_rfsm_explicit_window(capsys):
    code, out, _ = run_cli(
        [
            "solve-rfsm",
            "--example",
            "worked_A",
            "--n",
            "6",
            "--m",
            "9",
            "--format",
            "json",
        ],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["n"] == 6 and payload["m"] == 9
    assert payload["residual"] < 0.05


def test_solve_rfsm_epsilon_uses_certificates(capsys):
    code, out, _ = run_cli(
        [
            "solve-rfsm",
            "--example",
            "worked_A",
            "--epsilon",
            "1e-2",
            "--format",
            "json",
        ],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["delta"] == pytest.approx(1e-2 / 12.0)


def test_solve_rfsm_unmeetable_delta_exits_3(capsys):
    code, _, err = run_cli(
        [
            "solve-rfsm",
            "--example",
            "worked_A",
            "--n",
            "2",
            "--m",
            "2",
            "--delta",
            "1e-12",
        ],
        capsys,
    )
    assert code == 3
    assert "residual" in err


# ---------------------------------------------------------------------------
# study command
# ---------------------------------------------------------------------------


def test_study_worked_error_below_bound(capsys):
    code, out, _ = run_cli(
        [
            "study",
            "--example",
            "worked_A",
            "--coupling",
            "band",
            "--nmax",
            "20",
            "--format",
            "csv",
        ],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    header = lines[0].split(",")
    e_col = header.index("error")
    b_col = header.index("certified_bound")
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[e_col]) <= float(cells[b_col])


def test_study_explicit_coupling(capsys):
    ms = [n + 4 for n in range(2, 7)]
    code, out, _ = run_cli(
        [
            "study",
            "--example",
            "worked_A",
            "--coupling",
            "explicit:" + ",".join(map(str, ms)),
            "--nmin",
            "2",
            "--nmax",
            "6",
            "--reference-n",
            "32",
        ],
        capsys,
    )
    assert code == 0
    got_m = [int(line.split(",")[1]) for line in out.splitlines()[1:]]
    assert got_m == ms


def test_study_bad_coupling_exits_2(capsys):
    code, _, err = run_cli(
        ["study", "--example", "worked_A", "--coupling", "sofths", "--nmax", "8"],
        capsys,
    )
    assert code == 2
