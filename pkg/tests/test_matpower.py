"""Case parsing, per-unit conversion, admittance quantities, load series."""

import math

import numpy as np
import pytest

from simdnlp import (
    CaseError,
    branch_admittance,
    parse_case,
    parse_case_file,
    parse_load_series,
    validate_case,
)

MINI = """
function mpc = mini
mpc.version = '2';
mpc.baseMVA = 100;
%% comment line
mpc.bus = [
    1 3 90.0 30.0 5.0 2.0 1 1.0 0.0 230 1 1.1 0.9;
    2 1 50.0 10.0 0.0 0.0 1 1.0 0.0 230 1 1.1 0.9;
];
mpc.gen = [
    1 10 0 30 -30 1.0 100 1 40 5;
];
mpc.gencost = [
    2 0 0 3 0.11 5 0;
];
mpc.branch = [
    1 2 0.01938 0.05917 0.0528 130 0 0 0 0 1 -30 30;
];
"""


def test_per_unit_conversion():
    case = parse_case(MINI)
    b = case.buses[0]
    assert b.pd == pytest.approx(0.9)
    assert b.qd == pytest.approx(0.3)
    assert b.gs == pytest.approx(0.05)
    assert b.bs == pytest.approx(0.02)
    g = case.gens[0]
    assert (g.pmin, g.pmax) == (pytest.approx(0.05), pytest.approx(0.4))
    br = case.branches[0]
    assert br.rate_a == pytest.approx(1.3)
    assert br.angmax == pytest.approx(math.radians(30.0))


def test_per_unit_round_trip():
    case = parse_case(MINI)
    assert case.buses[0].pd * case.base_mva == pytest.approx(90.0, abs=0)


def test_gencost_positional_read():
    case = parse_case(MINI)
    g = case.gens[0]
    assert (g.c2, g.c1, g.c0) == (0.11, 5.0, 0.0)


def test_gencost_two_coefficients_pads_quadratic():
    text = MINI.replace("2 0 0 3 0.11 5 0", "2 0 0 2 7.5 1.25")
    g = parse_case(text).gens[0]
    assert (g.c2, g.c1, g.c0) == (0.0, 7.5, 1.25)


def test_tap_zero_becomes_unity():
    case = parse_case(MINI)
    assert case.branches[0].tap == 1.0


def test_parser_ignores_comments_blank_lines_and_separators():
    messy = MINI.replace(
        "    1 2 0.01938 0.05917 0.0528 130 0 0 0 0 1 -30 30;",
        "\n  % a comment inside the block\n"
        "    1 2 0.01938 0.05917 0.0528 130 0 0 0 0 1 -30 30 ; \n\n",
    )
    a = parse_case(MINI)
    b = parse_case(messy)
    assert a.branches[0] == b.branches[0]


def test_missing_block_raises():
    with pytest.raises(CaseError, match="gencost"):
        parse_case(MINI.replace("mpc.gencost", "mpc.ignored"))


def test_ragged_matrix_raises():
    bad = MINI.replace("2 1 50.0 10.0 0.0 0.0 1 1.0 0.0 230 1 1.1 0.9;", "2 1 50.0;")
    with pytest.raises(CaseError, match="ragged"):
        parse_case(bad)


def test_piecewise_cost_rejected():
    with pytest.raises(CaseError, match="model 1"):
        parse_case(MINI.replace("2 0 0 3 0.11 5 0", "1 0 0 4 0 0 1 1 2 2 3 3"))


def test_high_order_polynomial_rejected():
    with pytest.raises(CaseError, match="4 coefficients"):
        parse_case(MINI.replace("2 0 0 3 0.11 5 0", "2 0 0 4 1 0.11 5 0"))


def test_non_numeric_token_raises():
    with pytest.raises(CaseError):
        parse_case(MINI.replace("0.01938", "zap"))


def test_reference_bus_validation():
    no_ref = MINI.replace("1 3 90.0", "1 1 90.0")
    with pytest.raises(CaseError, match="no reference"):
        parse_case(no_ref)
    two_ref = MINI.replace("2 1 50.0", "2 3 50.0")
    with pytest.raises(CaseError, match="multiple reference"):
        parse_case(two_ref)


def test_dangling_generator_bus():
    bad = MINI.replace("mpc.gen = [\n    1 10", "mpc.gen = [\n    99 10")
    with pytest.raises(CaseError, match="absent bus 99"):
        parse_case(bad)


def test_validate_fixture_cases_clean(data_dir):
    for name in ("case3", "case5", "case14", "case5_strg"):
        case = parse_case_file(data_dir / f"{name}.m")
        assert validate_case(case) == []


def test_storage_block_parse(data_dir):
    case = parse_case_file(data_dir / "case5_strg.m")
    st = case.storage[0]
    assert st.bus_id == 2
    assert st.energy_rating == pytest.approx(4.5)
    assert st.charge_rating == pytest.approx(1.5)
    assert st.eta_charge == pytest.approx(0.9)


def test_admittance_pure_reactance():
    case = parse_case(MINI.replace("1 2 0.01938 0.05917", "1 2 0.0 1.0"))
    a = branch_admittance(case.branches[0])
    assert (a.g, a.b, a.tr, a.ti, a.tm) == (0.0, -1.0, 1.0, 0.0, 1.0)


def test_admittance_complex_reciprocal():
    case = parse_case(MINI)
    a = branch_admittance(case.branches[0])
    assert a.g == pytest.approx(4.9991, abs=1e-4)
    assert a.b == pytest.approx(-15.2631, abs=1e-4)


def test_admittance_shift_free_transformer():
    case = parse_case(MINI.replace(" 130 0 0 0 0 1 -30 30", " 130 0 0 1.05 0 1 -30 30"))
    a = branch_admittance(case.branches[0])
    assert (a.tm, a.tr, a.ti) == (pytest.approx(1.1025), 1.05, 0.0)


def test_admittance_inverse_identity_on_fixtures(data_dir):
    for name in ("case3", "case5", "case14"):
        case = parse_case_file(data_dir / f"{name}.m")
        for br in case.branches:
            a = branch_admittance(br)
            prod = complex(br.r, br.x) * complex(a.g, a.b)
            assert abs(prod - 1.0) < 1e-12


def test_degenerate_branch_raises():
    case = parse_case(MINI)
    br = case.branches[0]
    br.r = 0.0
    br.x = 0.0
    with pytest.raises(CaseError, match="degenerate"):
        branch_admittance(br)


def test_load_series_uniform():
    t, m = parse_load_series("100 100 100\n100 100 100\n", 3, 100.0)
    assert t == 2
    np.testing.assert_array_equal(m, np.ones((2, 3)))


def test_load_series_single_row():
    t, m = parse_load_series("10 20 30", 3, 100.0)
    assert t == 1
    np.testing.assert_allclose(m, [[0.1, 0.2, 0.3]])


def test_load_series_fixture_layout(data_dir):
    t, m = parse_load_series((data_dir / "case3_pd.txt").read_text(), 3, 100.0)
    assert t == 4
    np.testing.assert_allclose(m[0], [1.10, 1.10, 0.95])
    np.testing.assert_allclose(m[3], [0.935, 0.935, 0.8075])


def test_load_series_errors():
    with pytest.raises(CaseError, match="columns"):
        parse_load_series("1 2\n", 3, 100.0)
    with pytest.raises(CaseError, match="non-numeric"):
        parse_load_series("1 2 x\n", 3, 100.0)
    with pytest.raises(CaseError, match="empty"):
        parse_load_series("% only comments\n", 3, 100.0)
