"""OPF model construction: flows vs complex arithmetic, counts, storage,
balance accumulation, user callbacks."""

import numpy as np
import pytest

from simdnlp import (
    DataTable,
    ModelError,
    eval_constraints,
    extract_solution,
    field,
    mpopf_model,
    mpopf_model_series,
    opf_model,
    parse_case,
    parse_case_file,
)
from simdnlp.opf import angle_rows_eligible

LOSSLESS = """
function mpc = lossless2
mpc.baseMVA = 100;
mpc.bus = [
    1 3 0 0 0 0 1 1.0 0 230 1 1.1 0.9;
    2 1 0 0 0 0 1 1.0 0 230 1 1.1 0.9;
];
mpc.gen = [ 1 0 0 30 -30 1.0 100 1 40 0; ];
mpc.gencost = [ 2 0 0 3 0 1 0; ];
mpc.branch = [ 1 2 0.0 1.0 0.0 0 0 0 0 0 1 -30 30; ];
"""


def _complex_flows(case, vm, va):
    """Pi-model side flows from complex arithmetic (independent of kernels)."""
    pos = case.bus_index()
    sf, st = [], []
    v = vm * np.exp(1j * va)
    for br in case.branches:
        if br.status != 1:
            continue
        y = 1.0 / complex(br.r, br.x)
        tap = br.tap * np.exp(1j * br.shift)
        yff = (y + 0.5j * br.b_charging) / (abs(tap) ** 2)
        yft = -y / np.conj(tap)
        ytf = -y / tap
        ytt = y + 0.5j * br.b_charging
        vf, vt = v[pos[br.f_bus]], v[pos[br.t_bus]]
        sf.append(vf * np.conj(yff * vf + yft * vt))
        st.append(vt * np.conj(ytf * vf + ytt * vt))
    return np.array(sf), np.array(st)


@pytest.mark.parametrize("name", ["case5", "case14"])
@pytest.mark.parametrize("form", ["polar", "rect"])
def test_flow_rows_match_complex_arithmetic(data_dir, name, form):
    case = parse_case_file(data_dir / f"{name}.m")
    model, v, c = opf_model(case, form=form)
    rng = np.random.default_rng(42)
    nb = case.n_bus
    vm = rng.uniform(0.95, 1.05, size=nb)
    va = rng.uniform(-0.3, 0.3, size=nb)
    ref = next(i for i, b in enumerate(case.buses) if b.bus_type == 3)
    va[ref] = 0.0

    x = model.start.copy()
    if form == "polar":
        x[v.va.offset : v.va.offset + nb] = va
        x[v.vm.offset : v.vm.offset + nb] = vm
    else:
        x[v.vr.offset : v.vr.offset + nb] = vm * np.cos(va)
        x[v.vi.offset : v.vi.offset + nb] = vm * np.sin(va)
    # zero the lifted flow variables so each flow row evaluates to the flow itself
    x[v.p.offset : v.p.offset + v.p.size] = 0.0
    x[v.q.offset : v.q.offset + v.q.size] = 0.0

    out = np.empty(model.ncon)
    eval_constraints(model, x, out)
    nbr = v.p.size // 2
    sf, st = _complex_flows(case, vm, va)

    blk = c.c_from_active_power_flow
    np.testing.assert_allclose(out[blk.row_offset : blk.row_offset + nbr], sf.real, atol=1e-12)
    blk = c.c_from_reactive_power_flow
    np.testing.assert_allclose(out[blk.row_offset : blk.row_offset + nbr], sf.imag, atol=1e-12)
    blk = c.c_to_active_power_flow
    np.testing.assert_allclose(out[blk.row_offset : blk.row_offset + nbr], st.real, atol=1e-12)
    blk = c.c_to_reactive_power_flow
    np.testing.assert_allclose(out[blk.row_offset : blk.row_offset + nbr], st.imag, atol=1e-12)


def test_lossless_flat_start_carries_no_flow():
    case = parse_case(LOSSLESS)
    model, v, c = opf_model(case)
    x = model.start.copy()  # flat voltages, zero flow variables
    out = np.empty(model.ncon)
    eval_constraints(model, x, out)
    for blk in (c.c_from_active_power_flow, c.c_from_reactive_power_flow):
        np.testing.assert_allclose(out[blk.row_offset], 0.0, atol=1e-15)


def _static_counts(case, form):
    nb = case.n_bus
    ng = sum(g.status == 1 for g in case.gens)
    nbr = sum(br.status == 1 for br in case.branches)
    active = [br for br in case.branches if br.status == 1]
    nlim = sum(br.rate_a > 0 for br in active)
    nang = sum(angle_rows_eligible(br) for br in active)
    nvar = 2 * nb + 2 * ng + 4 * nbr
    ncon = 1 + 2 * nb + 4 * nbr + 2 * nlim + nang
    if form == "rect":
        ncon += nb + nang  # magnitude rows plus the second angle block
    return nvar, ncon


@pytest.mark.parametrize("name", ["case3", "case5", "case14"])
@pytest.mark.parametrize("form", ["polar", "rect"])
def test_static_structural_counts(data_dir, name, form):
    case = parse_case_file(data_dir / f"{name}.m")
    model, _, _ = opf_model(case, form=form)
    nvar, ncon = _static_counts(case, form)
    assert (model.nvar, model.ncon) == (nvar, ncon)


def test_case5_nvar_closed_form(data_dir):
    model, _, _ = opf_model(parse_case_file(data_dir / "case5.m"))
    assert model.nvar == 2 * 5 + 2 * 5 + 2 * 2 * 6 == 44


def test_mpopf_replicates_static_nvar(data_dir):
    case = parse_case_file(data_dir / "case5.m")
    static, _, _ = opf_model(case)
    mp, _, cons = mpopf_model(case, [1.0, 0.9, 0.8, 0.85])
    assert mp.nvar == 4 * static.nvar
    assert cons.c_ramp.nrows == (4 - 1) * 5


def test_mpopf_input_validation(data_dir):
    case = parse_case_file(data_dir / "case3.m")
    with pytest.raises(ModelError):
        mpopf_model(case, [])
    with pytest.raises(ModelError):
        mpopf_model(case, [1.0, 0.9], corrective_action_ratio=-0.1)
    with pytest.raises(ModelError):
        mpopf_model(case, [1.0, 0.9], corrective_action_ratio=1.5)
    with pytest.raises(ModelError):
        opf_model(case, form="cylindrical")


def test_series_matches_curve_structure(data_dir):
    case = parse_case_file(data_dir / "case3.m")
    m_curve, _, _ = mpopf_model(case, [1.0, 0.9, 0.8, 0.85])
    m_series, _, _ = mpopf_model_series(
        case, data_dir / "case3_pd.txt", data_dir / "case3_qd.txt"
    )
    assert (m_series.nvar, m_series.ncon) == (m_curve.nvar, m_curve.ncon)
    np.testing.assert_array_equal(m_series.con_lower, m_curve.con_lower)


def test_series_t1_equals_static_plus_empty_ramp(data_dir):
    case = parse_case_file(data_dir / "case3.m")
    static, _, _ = opf_model(case)
    pd = np.array([[b.pd for b in case.buses]])
    qd = np.array([[b.qd for b in case.buses]])
    mp, _, cons = mpopf_model_series(case, pd, qd)
    assert cons.c_ramp.nrows == 0
    assert (mp.nvar, mp.ncon) == (static.nvar, static.ncon)
    np.testing.assert_array_equal(mp.plan.jac_rows, static.plan.jac_rows)
    np.testing.assert_array_equal(mp.plan.jac_cols, static.plan.jac_cols)


def test_series_dimension_mismatch(data_dir):
    case = parse_case_file(data_dir / "case3.m")
    pd = np.ones((4, 3))
    with pytest.raises(ModelError):
        mpopf_model_series(case, pd, np.ones((3, 3)))
    with pytest.raises(ModelError):
        mpopf_model_series(case, np.ones((2, 4)), np.ones((2, 4)))


def test_balance_rows_accumulate_contribution_classes(data_dir):
    case = parse_case_file(data_dir / "case5_strg.m")
    model, v, c = mpopf_model(case, [1.0, 0.9])
    rng = np.random.default_rng(1)
    x = model.start + rng.uniform(-0.05, 0.05, size=model.nvar)
    out = np.empty(model.ncon)

    def balance_rows(xv):
        eval_constraints(model, xv, out)
        blk = c.c_active_power_balance
        return out[blk.row_offset : blk.row_offset + blk.nrows].copy()

    base = balance_rows(x)

    # zero the generators: rows drop by the per-bus generator sums
    x_nog = x.copy()
    x_nog[v.pg.offset : v.pg.offset + v.pg.size] = 0.0
    drop = base - balance_rows(x_nog)
    pg = extract_solution(x, v.pg)
    pos = case.bus_index()
    T = 2
    expected = np.zeros((case.n_bus, T))
    for gi, g in enumerate([g for g in case.gens if g.status == 1]):
        expected[pos[g.bus_id]] += pg[gi]
    np.testing.assert_allclose(drop, expected.ravel(), atol=1e-12)

    # zero the branch-flow variables: rows rise by the per-bus flow sums
    x_nop = x.copy()
    x_nop[v.p.offset : v.p.offset + v.p.size] = 0.0
    rise = balance_rows(x_nop) - base
    p = extract_solution(x, v.p)
    nbr = v.p.size // (2 * T)
    expected = np.zeros((case.n_bus, T))
    for bi, br in enumerate([br for br in case.branches if br.status == 1]):
        expected[pos[br.f_bus]] += p[bi]
        expected[pos[br.t_bus]] += p[nbr + bi]
    np.testing.assert_allclose(rise, expected.ravel(), atol=1e-12)

    # zero the storage injections: rows drop by ps at the device bus
    x_nos = x.copy()
    x_nos[v.ps.offset : v.ps.offset + v.ps.size] = 0.0
    drop = base - balance_rows(x_nos)
    ps = extract_solution(x, v.ps)
    expected = np.zeros((case.n_bus, T))
    for si, st in enumerate(case.storage):
        expected[pos[st.bus_id]] += ps[si]
    np.testing.assert_allclose(drop, expected.ravel(), atol=1e-12)


def test_storage_energy_rows_telescope(data_dir):
    case = parse_case_file(data_dir / "case5_strg.m")
    model, v, c = mpopf_model(case, [1.0, 0.9, 0.8, 0.85])
    rng = np.random.default_rng(2)
    x = model.start + rng.uniform(0.0, 0.05, size=model.nvar)
    out = np.empty(model.ncon)
    eval_constraints(model, x, out)

    pc = extract_solution(x, v.pc)
    pd = extract_solution(x, v.pd)
    ec = extract_solution(x, v.ec)
    e0 = np.array([st.energy_rating / 2.0 for st in case.storage])
    etac = np.array([st.eta_charge for st in case.storage])
    etad = np.array([st.eta_discharge for st in case.storage])

    init = c.c_storage_energy_init
    chain = c.c_storage_energy
    r_init = out[init.row_offset : init.row_offset + init.nrows]
    r_chain = out[chain.row_offset : chain.row_offset + chain.nrows].reshape(2, 3)
    total_residual = r_init + r_chain.sum(axis=1)
    # telescoping: sum of residuals = ec_T - E0 - sum_k (etac pc_k - pd_k / etad)
    expected = ec[:, -1] - e0 - (etac[:, None] * pc - pd / etad[:, None]).sum(axis=1)
    np.testing.assert_allclose(total_residual, expected, atol=1e-12)


def test_storage_counts_and_bounds(data_dir):
    case = parse_case_file(data_dir / "case5_strg.m")
    T = 4
    model, v, c = mpopf_model(case, [1.0] * T)
    base, _, _ = mpopf_model(parse_case_file(data_dir / "case5.m"), [1.0] * T)
    nd = 2
    assert model.nvar == base.nvar + 5 * nd * T
    # injection + energy chain + thermal rows; complementarity omitted by default
    assert model.ncon == base.ncon + nd * T + nd * T + nd * T
    np.testing.assert_array_equal(v.pc.upper, np.full(nd * T, 1.5))
    np.testing.assert_array_equal(v.ec.upper, np.full(nd * T, 4.5))
    np.testing.assert_array_equal(v.ec.start, np.full(nd * T, 2.25))

    m_cc, _, c_cc = mpopf_model(case, [1.0] * T, storage_complementarity_constraint=True)
    assert m_cc.ncon == model.ncon + nd * T
    assert c_cc.c_storage_complementarity.nrows == nd * T


def test_zero_rating_devices_are_pinned(data_dir):
    case = parse_case_file(data_dir / "case5_strg_zero.m")
    model, v, _ = mpopf_model(case, [1.0, 0.9])
    np.testing.assert_array_equal(v.pc.upper, np.zeros(4))
    np.testing.assert_array_equal(v.pd.upper, np.zeros(4))
    np.testing.assert_array_equal(v.ps.lower, np.zeros(4))
    np.testing.assert_array_equal(v.ps.upper, np.zeros(4))


def test_static_model_ignores_storage_block(data_dir):
    plain, _, _ = opf_model(parse_case_file(data_dir / "case5.m"))
    with_storage, _, _ = opf_model(parse_case_file(data_dir / "case5_strg.m"))
    assert (with_storage.nvar, with_storage.ncon) == (plain.nvar, plain.ncon)


def test_case14_wide_angle_bounds_drop_angle_rows(data_dir):
    case = parse_case_file(data_dir / "case14.m")
    assert not any(angle_rows_eligible(br) for br in case.branches)
    _, _, cons = opf_model(case)
    assert cons.c_angle_diff.nrows == 0


def test_inactive_elements_are_dropped(data_dir):
    text = (data_dir / "case5.m").read_text()
    # branch 4-5 and one generator switched off
    text = text.replace("4\t 5\t 0.00297\t 0.0297\t 0.00674\t 240.0\t 240.0\t 240.0\t 0.0\t 0.0\t 1",
                        "4\t 5\t 0.00297\t 0.0297\t 0.00674\t 240.0\t 240.0\t 240.0\t 0.0\t 0.0\t 0")
    text = text.replace("5\t 300.0\t 0.0\t 450.0\t -450.0\t 1.0\t 100.0\t 1",
                        "5\t 300.0\t 0.0\t 450.0\t -450.0\t 1.0\t 100.0\t 0")
    case = parse_case(text)
    model, v, _ = opf_model(case)
    assert v.pg.size == 4
    assert v.p.size == 2 * 5
    nvar, ncon = _static_counts(case, "polar")
    assert (model.nvar, model.ncon) == (nvar, ncon)


# ----------------------------------------------------------------------
# user callbacks
# ----------------------------------------------------------------------


def test_noop_callback_leaves_model_identical(data_dir):
    case = parse_case_file(data_dir / "case5.m")
    plain, _, _ = opf_model(case)
    hooked, _, _ = opf_model(case, user_callback=lambda core, v, c: None)
    assert (hooked.nvar, hooked.ncon) == (plain.nvar, plain.ncon)
    np.testing.assert_array_equal(hooked.plan.jac_rows, plain.plan.jac_rows)
    np.testing.assert_array_equal(hooked.plan.jac_cols, plain.plan.jac_cols)
    np.testing.assert_array_equal(hooked.plan.hess_rows, plain.plan.hess_rows)
    np.testing.assert_array_equal(hooked.plan.hess_cols, plain.plan.hess_cols)
    np.testing.assert_array_equal(hooked.lower, plain.lower)
    np.testing.assert_array_equal(hooked.upper, plain.upper)


def test_variable_only_callback_grows_nvar(data_dir):
    case = parse_case_file(data_dir / "case5.m")
    plain, _, _ = opf_model(case)

    def add_vars(core, v, c):
        blk = core.add_variable(3, lower=0.0, upper=1.0, name="extra")
        return {"extra": blk}, {}

    hooked, hv, _ = opf_model(case, user_callback=add_vars)
    assert hooked.nvar == plain.nvar + 3
    assert hooked.ncon == plain.ncon
    assert hv.extra.size == 3


def test_augment_callback_shifts_balance_row(data_dir):
    case = parse_case_file(data_dir / "case5.m")
    load = 0.37  # fixed extra draw at bus 1

    def electrolyzer(core, v, cons):
        blk = cons.c_active_power_balance
        core.modify_constraint(
            blk,
            -field("draw"),
            DataTable({"row": np.array([blk.row_offset + 0]), "draw": np.array([load])}),
        )

    plain, _, c0 = opf_model(case)
    hooked, _, c1 = opf_model(case, user_callback=electrolyzer)
    rng = np.random.default_rng(3)
    row = c0.c_active_power_balance.row_offset
    for _ in range(3):
        x = plain.start + rng.uniform(-0.1, 0.1, size=plain.nvar)
        a = np.empty(plain.ncon)
        b = np.empty(hooked.ncon)
        eval_constraints(plain, x, a)
        eval_constraints(hooked, x, b)
        assert b[row] - a[row] == pytest.approx(-load, abs=1e-15)
        mask = np.ones(plain.ncon, dtype=bool)
        mask[row] = False
        np.testing.assert_array_equal(a[mask], b[mask])


def test_callback_error_carries_context(data_dir):
    case = parse_case_file(data_dir / "case5.m")

    def broken(core, v, c):
        core.add_variable(0)

    with pytest.raises(ModelError, match="user callback"):
        opf_model(case, user_callback=broken)
