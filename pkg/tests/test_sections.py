import io

import numpy as np
import pytest

from finsec import (
    IndexSet,
    Shift,
    assemble,
    build_example,
    fsm_section,
    identity_operator,
    overflow_block,
    rfsm_section,
    spectral_norm,
    write_section_csv,
)

BLOCK_B = np.array([[1, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)


def symmetric_window(radius):
    return IndexSet.from_points(1, [(k,) for k in range(-radius, radius + 1)])


# ---------------------------------------------------------------------------
# assemble
# ---------------------------------------------------------------------------


def test_assemble_identity():
    w = symmetric_window(1)
    sec = assemble(identity_operator(), w, w)
    assert np.array_equal(sec.data, np.eye(3))


def test_assemble_shift_window():
    w = symmetric_window(1)
    sec = assemble(Shift.by(1), w, w)
    assert np.array_equal(
        sec.data.real, np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    )


def test_assemble_worked_window_is_corner_block(worked_case):
    w = symmetric_window(1)
    sec = assemble(worked_case.operator, w, w)
    assert np.array_equal(sec.data.real, BLOCK_B)


def test_assemble_provenance_invariant(worked_case):
    rows = symmetric_window(2)
    cols = IndexSet.from_points(1, [(k,) for k in range(-1, 4)])
    sec = assemble(worked_case.operator, rows, cols)
    for r, i in enumerate(rows.points):
        for c, j in enumerate(cols.points):
            assert sec.data[r, c] == worked_case.operator.entry(i, j)


# ---------------------------------------------------------------------------
# fsm_section
# ---------------------------------------------------------------------------


def test_blockdiag_even_section():
    case = build_example("blockdiag", 5)
    sec = fsm_section(case.operator, case.domain, 2)
    swap = np.array([[0, 1], [1, 0]], dtype=float)
    expected = np.zeros((5, 5))
    expected[0:2, 0:2] = swap
    expected[2, 2] = 1
    expected[3:5, 3:5] = swap
    assert np.array_equal(sec.data.real, expected)


def test_blockdiag_odd_section_has_zero_corners():
    case = build_example("blockdiag", 5)
    sec = fsm_section(case.operator, case.domain, 1)
    assert np.array_equal(sec.data.real, np.diag([0.0, 1.0, 0.0]))


def test_identity_section_any_n(square):
    sec = fsm_section(identity_operator(2), square, 2)
    assert np.array_equal(sec.data, np.eye(25))


def test_sections_nest(worked_case):
    outer = fsm_section(worked_case.operator, worked_case.domain, 5)
    inner = fsm_section(worked_case.operator, worked_case.domain, 4)
    keep = [outer.rows.index(p) for p in inner.rows.points]
    assert np.array_equal(outer.data[np.ix_(keep, keep)], inner.data)


# ---------------------------------------------------------------------------
# rfsm_section
# ---------------------------------------------------------------------------


def test_rfsm_shift_contains_unit_columns(interval):
    sec = rfsm_section(Shift.by(1), interval, 2, 1)
    assert sec.shape == (5, 3)
    # every window-1 column holds exactly one unit entry, shifted down
    for c, j in enumerate(sec.cols.points):
        col = sec.data[:, c]
        assert np.count_nonzero(col) == 1
        assert col[sec.rows.index((j[0] + 1,))] == 1


def test_rfsm_equals_fsm_for_square_cut(worked_case):
    a, dom = worked_case.operator, worked_case.domain
    assert np.array_equal(
        rfsm_section(a, dom, 3, 3).data, fsm_section(a, dom, 3).data
    )


def test_rfsm_worked_tall_window(worked_case):
    sec = rfsm_section(worked_case.operator, worked_case.domain, 4, 1)
    assert sec.shape == (9, 3)
    top = [sec.rows.index((k,)) for k in (-1, 0, 1)]
    assert np.array_equal(sec.data.real[top, :], BLOCK_B)
    # the coupling row of ones appears at row -2 (hand-derived block layout)
    assert np.array_equal(sec.data.real[sec.rows.index((-2,)), :], [1, 1, 1])
    nonzero_rows = {i[0] for r, i in enumerate(sec.rows.points) if sec.data[r].any()}
    assert nonzero_rows == {-2, -1, 0}  # row 1 is the zero row of the corner block


# ---------------------------------------------------------------------------
# overflow_block
# ---------------------------------------------------------------------------


def test_overflow_empty_beyond_band(interval, worked_case):
    for n in (1, 2, 5):
        block = overflow_block(worked_case.operator, interval, n + 3, n)
        assert block.shape[0] == 0
        assert spectral_norm(block.data) == 0.0


def test_overflow_shift_square_cut(interval):
    block = overflow_block(Shift.by(1), interval, 3, 3)
    assert set(block.rows.points) == {(-4,), (4,)}
    assert spectral_norm(block.data) == pytest.approx(1.0, abs=1e-12)
    # only the top escape row carries the unit entry
    assert block.data[block.rows.index((4,)), block.cols.index((3,))] == 1
    assert not block.data[block.rows.index((-4,))].any()


def test_overflow_blockdiag_odd_cut(interval):
    case = build_example("blockdiag", 8)
    n = 5
    block = overflow_block(case.operator, interval, n, n)
    assert set(block.rows.points) == {(-6,), (6,)}
    for z, j in (((-6,), (-5,)), ((6,), (5,))):
        assert block.data[block.rows.index(z), block.cols.index(j)] == 1
    assert spectral_norm(block.data) == pytest.approx(1.0, abs=1e-12)


def test_overflow_carries_all_escaping_action(interval):
    # stacking the rectangular section on the overflow block reproduces the
    # whole action of the operator on window-n columns
    rng = np.random.default_rng(9)
    from conftest import random_band_operator
    from finsec import SupportedVector

    for _ in range(5):
        a = random_band_operator(rng, width=int(rng.integers(1, 4)))
        n, m = 3, 4
        sec = rfsm_section(a, interval, m, n)
        over = overflow_block(a, interval, m, n)
        x = rng.standard_normal(len(sec.cols))
        u = SupportedVector.from_array(sec.cols, x)
        image = a.apply(u)
        stacked_rows = list(sec.rows.points) + list(over.rows.points)
        stacked = np.concatenate([sec.data @ x, over.data @ x])
        for p, value in zip(stacked_rows, stacked):
            assert image.get(p) == pytest.approx(value, abs=1e-12)
        # nothing escapes the stacked row set
        assert set(image.support()) <= set(stacked_rows)


def test_assemble_adjoint_compatibility(worked_case):
    a = worked_case.operator
    rows = symmetric_window(3)
    cols = symmetric_window(2)
    direct = assemble(a, rows, cols)
    flipped = assemble(a.adjoint(), cols, rows)
    assert np.array_equal(flipped.data, direct.data.conj().T)


def test_section_csv_dump(interval):
    sec = fsm_section(Shift.by(1), interval, 1)
    buf = io.StringIO()
    write_section_csv(sec, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "row,col,real,imag"
    assert len(lines) == 1 + 9
    assert "0,-1,1,0" in lines  # the subdiagonal unit entry
