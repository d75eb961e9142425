"""AC optimal power flow models built on the core modeling layer.

Static, multi-period, and storage-equipped formulations in polar or
rectangular voltage coordinates.  Branch flows are lifted: explicit per
branch-direction variables ``p``/``q`` are defined by equality rows, so
thermal rows stay quadratic and nodal balances stay sums of simple terms.

Every builder returns ``(model, vars, cons)`` where ``vars``/``cons`` are
namespaces of the registered variable and constraint blocks.
"""

from __future__ import annotations

import math
import time
from pathlib import Path
from types import SimpleNamespace
from typing import Callable

import numpy as np

from .core import CompiledModel, DataTable, ModelCore, ModelError, extract_solution
from .expressions import cos, field, sin
from .matpower import CaseData, CaseError, branch_admittance, parse_case_file, validate_case

# Rectangular angle-difference rows use tan(angmin/angmax); both forms omit
# the rows when the bounds leave tan's monotone range (the row would then be
# meaningless in rect and vacuous in polar).
_ANGLE_LIMIT = math.pi / 2


def _as_case(case) -> CaseData:
    if isinstance(case, (str, Path)):
        return parse_case_file(case)
    return case


def angle_rows_eligible(branch) -> bool:
    return -_ANGLE_LIMIT < branch.angmin and branch.angmax < _ANGLE_LIMIT


def opf_model(
    case,
    form: str = "polar",
    user_callback: Callable | None = None,
) -> tuple[CompiledModel, SimpleNamespace, SimpleNamespace]:
    """Static AC OPF.  ``case`` is a path or a parsed :class:`CaseData`."""
    case = _as_case(case)
    pd = np.array([[b.pd for b in case.buses]])
    qd = np.array([[b.qd for b in case.buses]])
    return _build(case, form, pd, qd, corrective_action_ratio=None,
                  with_storage=False, complementarity=False,
                  user_callback=user_callback)


def mpopf_model(
    case,
    curve,
    corrective_action_ratio: float = 0.25,
    storage_complementarity_constraint: bool = False,
    user_callback: Callable | None = None,
    form: str = "polar",
) -> tuple[CompiledModel, SimpleNamespace, SimpleNamespace]:
    """Multi-period AC OPF with the static demand scaled by ``curve``.

    Period ``t`` loads every bus at ``curve[t]`` times its static demand.
    Consecutive-period generator output changes are limited to
    ``corrective_action_ratio * (Pmax - Pmin)``.  Storage devices present in
    the case are modeled; ``storage_complementarity_constraint`` switches the
    charge/discharge complementarity rows on (off by default: the relaxation
    is checked post-solve via :func:`storage_complementarity_violation`).
    """
    case = _as_case(case)
    curve = np.asarray(curve, dtype=np.float64)
    if curve.ndim != 1 or curve.size == 0:
        raise ModelError("demand curve must be a nonempty vector")
    static_pd = np.array([b.pd for b in case.buses])
    static_qd = np.array([b.qd for b in case.buses])
    return _build(
        case,
        form,
        np.outer(curve, static_pd),
        np.outer(curve, static_qd),
        corrective_action_ratio=corrective_action_ratio,
        with_storage=bool(case.storage),
        complementarity=storage_complementarity_constraint,
        user_callback=user_callback,
    )


def mpopf_model_series(
    case,
    pd_series,
    qd_series,
    corrective_action_ratio: float = 0.25,
    storage_complementarity_constraint: bool = False,
    user_callback: Callable | None = None,
    form: str = "polar",
) -> tuple[CompiledModel, SimpleNamespace, SimpleNamespace]:
    """Multi-period AC OPF with per-bus, per-period loads.

    ``pd_series``/``qd_series`` are T x n_bus per-unit matrices, or paths to
    whitespace-separated MW matrices (one period per row, bus-section column
    order).
    """
    from .matpower import parse_load_series

    case = _as_case(case)
    if isinstance(pd_series, (str, Path)):
        _, pd_series = parse_load_series(Path(pd_series).read_text(), case.n_bus, case.base_mva)
    if isinstance(qd_series, (str, Path)):
        _, qd_series = parse_load_series(Path(qd_series).read_text(), case.n_bus, case.base_mva)
    pd_series = np.asarray(pd_series, dtype=np.float64)
    qd_series = np.asarray(qd_series, dtype=np.float64)
    if pd_series.shape != qd_series.shape:
        raise ModelError(
            f"active series {pd_series.shape} and reactive series "
            f"{qd_series.shape} differ in shape"
        )
    if pd_series.ndim != 2 or pd_series.shape[1] != case.n_bus:
        raise ModelError(
            f"load series must be T x {case.n_bus}, got {pd_series.shape}"
        )
    return _build(
        case,
        form,
        pd_series,
        qd_series,
        corrective_action_ratio=corrective_action_ratio,
        with_storage=bool(case.storage),
        complementarity=storage_complementarity_constraint,
        user_callback=user_callback,
    )


def apply_user_callback(core, vars_ns, cons_ns, callback) -> None:
    """Run a user extension hook against a fully registered, uncompiled core.

    The callback receives ``(core, vars, cons)`` and may add variables,
    objectives, constraints, and augments.  It may return a pair of mappings
    ``(new_vars, new_cons)`` whose entries are merged into the namespaces.
    """
    if callback is None:
        return
    try:
        result = callback(core, vars_ns, cons_ns)
    except ModelError as err:
        raise ModelError(f"user callback failed: {err}") from err
    if result is None:
        return
    new_vars, new_cons = result
    for name, block in (new_vars or {}).items():
        setattr(vars_ns, name, block)
    for name, block in (new_cons or {}).items():
        setattr(cons_ns, name, block)


def storage_complementarity_violation(x: np.ndarray, vars_ns: SimpleNamespace) -> float:
    """max over devices and periods of pc * pd at the given point."""
    if not hasattr(vars_ns, "pc") or not hasattr(vars_ns, "pd"):
        return 0.0
    pc = extract_solution(x, vars_ns.pc)
    pd = extract_solution(x, vars_ns.pd)
    prod = pc * pd
    return float(prod.max()) if prod.size else 0.0


# ----------------------------------------------------------------------
# internals
# ----------------------------------------------------------------------


def _mid_start(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    mid = 0.5 * (lo + hi)
    return np.where(np.isfinite(mid), mid, 0.0)


def _build(
    case: CaseData,
    form: str,
    pd: np.ndarray,
    qd: np.ndarray,
    corrective_action_ratio,
    with_storage: bool,
    complementarity: bool,
    user_callback,
) -> tuple[CompiledModel, SimpleNamespace, SimpleNamespace]:
    t_build = time.perf_counter()
    if form not in ("polar", "rect"):
        raise ModelError(f"unknown formulation {form!r}; use 'polar' or 'rect'")
    errors = validate_case(case)
    if errors:
        raise CaseError(f"invalid case {case.name}: " + "; ".join(errors))
    if corrective_action_ratio is not None and not 0.0 <= corrective_action_ratio <= 1.0:
        raise ModelError(
            f"corrective_action_ratio must be in [0, 1], got {corrective_action_ratio}"
        )

    T = pd.shape[0]
    nb = case.n_bus
    pos = case.bus_index()
    ref = next(i for i, b in enumerate(case.buses) if b.bus_type == 3)

    gens = [g for g in case.gens if g.status == 1]
    branches = [br for br in case.branches if br.status == 1]
    ng, nbr = len(gens), len(branches)
    adm = [branch_admittance(br) for br in branches]
    fpos = np.array([pos[br.f_bus] for br in branches], dtype=np.int64)
    tpos = np.array([pos[br.t_bus] for br in branches], dtype=np.int64)
    gpos = np.array([pos[g.bus_id] for g in gens], dtype=np.int64)

    def shape(n):
        return (n, T) if T > 1 else (n,)

    def gflat(i, t):
        i = np.asarray(i, dtype=np.int64)
        return i * T + np.asarray(t, dtype=np.int64) if T > 1 else i

    def per_period(values):
        """Tile a per-element array over periods, element-major."""
        return np.repeat(np.asarray(values, dtype=np.float64), T)

    def records(n):
        """(element, period) index pairs, element-major."""
        return np.repeat(np.arange(n, dtype=np.int64), T), np.tile(np.arange(T, dtype=np.int64), n)

    core = ModelCore()
    vars_ns = SimpleNamespace()
    cons_ns = SimpleNamespace()

    vmax = np.array([b.vmax for b in case.buses])
    vmin = np.array([b.vmin for b in case.buses])

    if form == "polar":
        va = core.add_variable(shape(nb), start=0.0, name="va")
        vm = core.add_variable(
            shape(nb), lower=per_period(vmin), upper=per_period(vmax), start=1.0, name="vm"
        )
        vars_ns.va, vars_ns.vm = va, vm
    else:
        vr_lo = per_period(-vmax)
        vr_lo[gflat(np.full(T, ref, dtype=np.int64), np.arange(T))] = 0.0
        vr = core.add_variable(shape(nb), lower=vr_lo, upper=per_period(vmax), start=1.0, name="vr")
        vi = core.add_variable(
            shape(nb), lower=per_period(-vmax), upper=per_period(vmax), start=0.0, name="vi"
        )
        vars_ns.vr, vars_ns.vi = vr, vi

    pg_lo, pg_hi = per_period([g.pmin for g in gens]), per_period([g.pmax for g in gens])
    qg_lo, qg_hi = per_period([g.qmin for g in gens]), per_period([g.qmax for g in gens])
    pg = core.add_variable(shape(ng), lower=pg_lo, upper=pg_hi, start=_mid_start(pg_lo, pg_hi), name="pg")
    qg = core.add_variable(shape(ng), lower=qg_lo, upper=qg_hi, start=_mid_start(qg_lo, qg_hi), name="qg")
    p = core.add_variable(shape(2 * nbr), start=0.0, name="p")
    q = core.add_variable(shape(2 * nbr), start=0.0, name="q")
    vars_ns.pg, vars_ns.qg, vars_ns.p, vars_ns.q = pg, qg, p, q

    # generation cost, applied to MW
    g_rep, g_t = records(ng)
    base = case.base_mva
    pg_mw = pg["g"] * base
    core.add_objective(
        field("c2") * pg_mw**2 + field("c1") * pg_mw + field("c0"),
        DataTable(
            {
                "g": gflat(g_rep, g_t),
                "c2": per_period([g.c2 for g in gens]),
                "c1": per_period([g.c1 for g in gens]),
                "c0": per_period([g.c0 for g in gens]),
            }
        ),
    )

    # reference bus: pin the angle (polar) / the imaginary part (rect)
    ref_idx = gflat(np.full(T, ref, dtype=np.int64), np.arange(T))
    ref_var = va if form == "polar" else vi
    cons_ns.c_ref_angle = core.add_constraint(ref_var["i"], DataTable({"i": ref_idx}))

    # branch flow definitions: one row per branch side defines the lifted
    # p/q variable as the pi-model flow expression
    br_rep, br_t = records(nbr)

    def flow_table(side: str, c1, c2, c3, flow_block_dir):
        self_pos = fpos if side == "from" else tpos
        other_pos = tpos if side == "from" else fpos
        return DataTable(
            {
                "i": gflat(self_pos[br_rep], br_t),
                "j": gflat(other_pos[br_rep], br_t),
                "d": gflat(flow_block_dir[br_rep], br_t),
                "a1": per_period(c1),
                "a2": per_period(c2),
                "a3": per_period(c3),
            }
        )

    if form == "polar":

        def flow_kernel(flow_var):
            delta = va["i"] - va["j"]
            return (
                field("a1") * vm["i"] ** 2
                + vm["i"] * vm["j"] * (field("a2") * cos(delta) + field("a3") * sin(delta))
                - flow_var["d"]
            )

    else:

        def flow_kernel(flow_var):
            wr = vr["i"] * vr["j"] + vi["i"] * vi["j"]
            wi = vi["i"] * vr["j"] - vr["i"] * vi["j"]
            return (
                field("a1") * (vr["i"] ** 2 + vi["i"] ** 2)
                + field("a2") * wr
                + field("a3") * wi
                - flow_var["d"]
            )

    g_s = np.array([a.g for a in adm])
    b_s = np.array([a.b for a in adm])
    tr = np.array([a.tr for a in adm])
    ti = np.array([a.ti for a in adm])
    tm = np.array([a.tm for a in adm])
    b_fr = np.array([a.b_fr for a in adm])
    b_to = np.array([a.b_to for a in adm])
    g_fr = np.array([a.g_fr for a in adm])
    g_to = np.array([a.g_to for a in adm])

    from_dir = np.arange(nbr, dtype=np.int64)
    to_dir = nbr + from_dir

    cons_ns.c_from_active_power_flow = core.add_constraint(
        flow_kernel(p),
        flow_table("from", (g_s + g_fr) / tm, (-g_s * tr + b_s * ti) / tm,
                   (-b_s * tr - g_s * ti) / tm, from_dir),
    )
    cons_ns.c_from_reactive_power_flow = core.add_constraint(
        flow_kernel(q),
        flow_table("from", -(b_s + b_fr) / tm, (b_s * tr + g_s * ti) / tm,
                   (-g_s * tr + b_s * ti) / tm, from_dir),
    )
    cons_ns.c_to_active_power_flow = core.add_constraint(
        flow_kernel(p),
        flow_table("to", g_s + g_to, (-g_s * tr - b_s * ti) / tm,
                   (-b_s * tr + g_s * ti) / tm, to_dir),
    )
    cons_ns.c_to_reactive_power_flow = core.add_constraint(
        flow_kernel(q),
        flow_table("to", -(b_s + b_to), (b_s * tr - g_s * ti) / tm,
                   (-g_s * tr - b_s * ti) / tm, to_dir),
    )

    # nodal balances: base row holds load and shunt, every device augments
    bus_rep, bus_t = records(nb)
    gs = np.array([b.gs for b in case.buses])
    bs = np.array([b.bs for b in case.buses])
    if form == "polar":
        v2 = vm["b"] ** 2
    else:
        v2 = vr["b"] ** 2 + vi["b"] ** 2

    p_bal_kernel = -field("pd")
    p_bal_cols = {"pd": pd.T.ravel()}
    if np.any(gs != 0.0):
        p_bal_kernel = p_bal_kernel - field("gs") * v2
        p_bal_cols["gs"] = per_period(gs)
        p_bal_cols["b"] = gflat(bus_rep, bus_t)
    q_bal_kernel = -field("qd")
    q_bal_cols = {"qd": qd.T.ravel()}
    if np.any(bs != 0.0):
        q_bal_kernel = q_bal_kernel + field("bs") * v2
        q_bal_cols["bs"] = per_period(bs)
        q_bal_cols["b"] = gflat(bus_rep, bus_t)

    p_bal = core.add_constraint(p_bal_kernel, DataTable(p_bal_cols))
    q_bal = core.add_constraint(q_bal_kernel, DataTable(q_bal_cols))
    cons_ns.c_active_power_balance = p_bal
    cons_ns.c_reactive_power_balance = q_bal

    def balance_rows(block, bus_positions, t):
        return block.row_offset + bus_positions * T + t

    # generators inject into their bus
    core.modify_constraint(
        p_bal,
        pg["g"],
        DataTable({"g": gflat(g_rep, g_t), "row": balance_rows(p_bal, gpos[g_rep], g_t)}),
    )
    core.modify_constraint(
        q_bal,
        qg["g"],
        DataTable({"g": gflat(g_rep, g_t), "row": balance_rows(q_bal, gpos[g_rep], g_t)}),
    )

    # each branch direction withdraws its flow from its terminal bus
    dir_rep, dir_t = records(2 * nbr)
    dir_bus = np.concatenate([fpos, tpos])
    core.modify_constraint(
        p_bal,
        -p["d"],
        DataTable({"d": gflat(dir_rep, dir_t), "row": balance_rows(p_bal, dir_bus[dir_rep], dir_t)}),
    )
    core.modify_constraint(
        q_bal,
        -q["d"],
        DataTable({"d": gflat(dir_rep, dir_t), "row": balance_rows(q_bal, dir_bus[dir_rep], dir_t)}),
    )

    # thermal limits (rate 0 means unlimited -> no row)
    rate = np.array([br.rate_a for br in branches])
    limited = np.flatnonzero(rate > 0.0).astype(np.int64)
    nlim = limited.size
    lim_rep, lim_t = records(nlim)
    rate_sq = per_period(rate[limited] ** 2)
    thermal_kernel = p["d"] ** 2 + q["d"] ** 2
    cons_ns.c_thermal_from = core.add_constraint(
        thermal_kernel,
        DataTable({"d": gflat(from_dir[limited][lim_rep], lim_t)}),
        lb=-np.inf,
        ub=rate_sq,
    )
    cons_ns.c_thermal_to = core.add_constraint(
        thermal_kernel,
        DataTable({"d": gflat(to_dir[limited][lim_rep], lim_t)}),
        lb=-np.inf,
        ub=rate_sq,
    )

    # angle-difference limits
    ang_ok = np.array([angle_rows_eligible(br) for br in branches], dtype=bool)
    ang_idx = np.flatnonzero(ang_ok).astype(np.int64)
    na = ang_idx.size
    ang_rep, ang_t = records(na)
    angmin = per_period([branches[i].angmin for i in ang_idx])
    angmax = per_period([branches[i].angmax for i in ang_idx])
    ang_cols = {
        "i": gflat(fpos[ang_idx][ang_rep], ang_t),
        "j": gflat(tpos[ang_idx][ang_rep], ang_t),
    }
    if form == "polar":
        cons_ns.c_angle_diff = core.add_constraint(
            va["i"] - va["j"], DataTable(ang_cols), lb=angmin, ub=angmax
        )
    else:
        wr = vr["i"] * vr["j"] + vi["i"] * vi["j"]
        wi = vi["i"] * vr["j"] - vr["i"] * vi["j"]
        cons_ns.c_angle_diff_lo = core.add_constraint(
            wi - field("tmin") * wr,
            DataTable({**ang_cols, "tmin": np.tan(angmin)}),
            lb=0.0,
            ub=np.inf,
        )
        cons_ns.c_angle_diff_hi = core.add_constraint(
            wi - field("tmax") * wr,
            DataTable({**ang_cols, "tmax": np.tan(angmax)}),
            lb=-np.inf,
            ub=0.0,
        )

    # rect form enforces the voltage magnitude window as rows
    if form == "rect":
        cons_ns.c_voltage_magnitude = core.add_constraint(
            vr["b"] ** 2 + vi["b"] ** 2,
            DataTable({"b": gflat(bus_rep, bus_t)}),
            lb=per_period(vmin**2),
            ub=per_period(vmax**2),
        )

    # generator ramping between consecutive periods (empty block when T = 1)
    if corrective_action_ratio is not None:
        r_rep = np.repeat(np.arange(ng, dtype=np.int64), T - 1)
        r_t = np.tile(np.arange(T - 1, dtype=np.int64), ng)
        span = np.repeat([g.pmax - g.pmin for g in gens], T - 1)
        limit = corrective_action_ratio * span
        cons_ns.c_ramp = core.add_constraint(
            pg["i1"] - pg["i0"],
            DataTable({"i0": gflat(r_rep, r_t), "i1": gflat(r_rep, r_t + 1)}),
            lb=-limit,
            ub=limit,
        )

    if with_storage:
        add_storage(core, case, T, vars_ns, cons_ns,
                    relax_complementarity=not complementarity)

    apply_user_callback(core, vars_ns, cons_ns, user_callback)

    model = core.compile()
    model.build_seconds += time.perf_counter() - t_build
    return model, vars_ns, cons_ns


def add_storage(
    core: ModelCore,
    case: CaseData,
    T: int,
    vars_ns: SimpleNamespace,
    cons_ns: SimpleNamespace,
    relax_complementarity: bool,
) -> None:
    """Register storage devices against an existing multi-period OPF core.

    Per device and period: charge/discharge rates ``pc``/``pd`` with a net
    injection ``ps = pd - pc`` entering the bus active balance (``qs`` the
    reactive one), a state-of-charge ``ec`` driven by efficiency-weighted
    rates from the initial fill of half the energy rating, an apparent-power
    limit at the larger of the two ratings, and (unless relaxed) the
    complementarity row pc * pd = 0.
    """
    devices = case.storage
    if not devices:
        raise ModelError("case has no storage devices")
    for i, st in enumerate(devices):
        if st.eta_charge <= 0.0 or st.eta_discharge <= 0.0:
            raise ModelError(f"storage {i}: nonpositive efficiency")
        if st.energy_rating <= 0.0:
            raise ModelError(f"storage {i}: nonpositive energy rating")

    nd = len(devices)
    pos = case.bus_index()
    sbus = np.array([pos[st.bus_id] for st in devices], dtype=np.int64)
    s_rating = np.array([max(st.charge_rating, st.discharge_rating) for st in devices])
    e_max = np.array([st.energy_rating for st in devices])

    def shape(n):
        return (n, T) if T > 1 else (n,)

    def gflat(i, t):
        i = np.asarray(i, dtype=np.int64)
        return i * T + np.asarray(t, dtype=np.int64) if T > 1 else i

    def per_period(values):
        return np.repeat(np.asarray(values, dtype=np.float64), T)

    d_rep = np.repeat(np.arange(nd, dtype=np.int64), T)
    d_t = np.tile(np.arange(T, dtype=np.int64), nd)

    pc = core.add_variable(
        shape(nd), lower=0.0, upper=per_period([st.charge_rating for st in devices]),
        start=0.0, name="pc",
    )
    pd_v = core.add_variable(
        shape(nd), lower=0.0, upper=per_period([st.discharge_rating for st in devices]),
        start=0.0, name="pd",
    )
    ec = core.add_variable(
        shape(nd), lower=0.0, upper=per_period(e_max),
        start=per_period(e_max / 2.0), name="ec",
    )
    ps = core.add_variable(
        shape(nd), lower=per_period(-s_rating), upper=per_period(s_rating),
        start=0.0, name="ps",
    )
    qs = core.add_variable(
        shape(nd), lower=per_period(-s_rating), upper=per_period(s_rating),
        start=0.0, name="qs",
    )
    vars_ns.pc, vars_ns.pd, vars_ns.ec, vars_ns.ps, vars_ns.qs = pc, pd_v, ec, ps, qs

    # net injection definition: ps = pd - pc
    cons_ns.c_storage_injection = core.add_constraint(
        ps["s"] - pd_v["s"] + pc["s"],
        DataTable({"s": gflat(d_rep, d_t)}),
    )

    etac = np.array([st.eta_charge for st in devices])
    etad = np.array([st.eta_discharge for st in devices])

    # state of charge: first period starts from half the energy rating,
    # later periods chain on the previous one (period length = 1)
    cons_ns.c_storage_energy_init = core.add_constraint(
        ec["e"] - field("e0") - field("etac") * pc["c"] + pd_v["d"] / field("etad"),
        DataTable(
            {
                "e": gflat(np.arange(nd, dtype=np.int64), np.zeros(nd, dtype=np.int64)),
                "c": gflat(np.arange(nd, dtype=np.int64), np.zeros(nd, dtype=np.int64)),
                "d": gflat(np.arange(nd, dtype=np.int64), np.zeros(nd, dtype=np.int64)),
                "e0": e_max / 2.0,
                "etac": etac,
                "etad": etad,
            }
        ),
    )
    k_rep = np.repeat(np.arange(nd, dtype=np.int64), T - 1)
    k_t = np.tile(np.arange(1, T, dtype=np.int64), nd)
    cons_ns.c_storage_energy = core.add_constraint(
        ec["e"] - ec["eprev"] - field("etac") * pc["c"] + pd_v["d"] / field("etad"),
        DataTable(
            {
                "e": gflat(k_rep, k_t),
                "eprev": gflat(k_rep, k_t - 1),
                "c": gflat(k_rep, k_t),
                "d": gflat(k_rep, k_t),
                "etac": np.repeat(etac, T - 1),
                "etad": np.repeat(etad, T - 1),
            }
        ),
    )

    cons_ns.c_storage_thermal = core.add_constraint(
        ps["s"] ** 2 + qs["s"] ** 2,
        DataTable({"s": gflat(d_rep, d_t)}),
        lb=-np.inf,
        ub=per_period(s_rating**2),
    )

    if not relax_complementarity:
        cons_ns.c_storage_complementarity = core.add_constraint(
            pc["s"] * pd_v["s"],
            DataTable({"s": gflat(d_rep, d_t)}),
        )

    # inject into the nodal balances
    p_bal = cons_ns.c_active_power_balance
    q_bal = cons_ns.c_reactive_power_balance
    core.modify_constraint(
        p_bal,
        ps["s"],
        DataTable({"s": gflat(d_rep, d_t), "row": p_bal.row_offset + sbus[d_rep] * T + d_t}),
    )
    core.modify_constraint(
        q_bal,
        qs["s"],
        DataTable({"s": gflat(d_rep, d_t), "row": q_bal.row_offset + sbus[d_rep] * T + d_t}),
    )
