"""One-shot oracle: independent AC-OPF solve of the case5 fixture.

Builds a dense polar AC-OPF directly from the case data using complex
branch-admittance arithmetic (no lifted flow variables, no kernel layer) and
solves it with scipy's trust-constr.  The resulting objective is committed
to data/case5_reference_objective.txt and asserted by the acceptance suite.

Run from the repository root:  python3 tests/oracle_case5_reference.py
"""

import numpy as np
from scipy.optimize import Bounds, NonlinearConstraint, minimize

from simdnlp import parse_case_file


def dense_polar_opf(case):
    nb = len(case.buses)
    gens = [g for g in case.gens if g.status == 1]
    branches = [br for br in case.branches if br.status == 1]
    ng, nbr = len(gens), len(branches)
    pos = case.bus_index()
    ref = next(i for i, b in enumerate(case.buses) if b.bus_type == 3)
    f = np.array([pos[br.f_bus] for br in branches])
    t = np.array([pos[br.t_bus] for br in branches])

    y = np.array([1.0 / complex(br.r, br.x) for br in branches])
    bc = np.array([br.b_charging for br in branches])
    tap = np.array([br.tap * np.exp(1j * br.shift) for br in branches])
    yff = (y + 0.5j * bc) / (np.abs(tap) ** 2)
    yft = -y / np.conj(tap)
    ytf = -y / tap
    ytt = y + 0.5j * bc

    pd = np.array([b.pd for b in case.buses])
    qd = np.array([b.qd for b in case.buses])
    gs = np.array([b.gs for b in case.buses])
    bs = np.array([b.bs for b in case.buses])
    gbus = np.array([pos[g.bus_id] for g in gens])
    base = case.base_mva

    n = 2 * nb + 2 * ng
    sl_va, sl_vm = slice(0, nb), slice(nb, 2 * nb)
    sl_pg, sl_qg = slice(2 * nb, 2 * nb + ng), slice(2 * nb + ng, n)

    def flows(x):
        va, vm = x[sl_va], x[sl_vm]
        v = vm * np.exp(1j * va)
        sf = v[f] * np.conj(yff * v[f] + yft * v[t])
        st = v[t] * np.conj(ytf * v[f] + ytt * v[t])
        return sf, st

    def balance(x):
        va, vm = x[sl_va], x[sl_vm]
        sf, st = flows(x)
        inj_p = np.bincount(gbus, weights=x[sl_pg], minlength=nb)
        inj_q = np.bincount(gbus, weights=x[sl_qg], minlength=nb)
        out_p = np.bincount(f, weights=sf.real, minlength=nb) + np.bincount(
            t, weights=st.real, minlength=nb
        )
        out_q = np.bincount(f, weights=sf.imag, minlength=nb) + np.bincount(
            t, weights=st.imag, minlength=nb
        )
        p_res = inj_p - pd - gs * vm**2 - out_p
        q_res = inj_q - qd + bs * vm**2 - out_q
        return np.concatenate([p_res, q_res, [va[ref]]])

    def thermal(x):
        sf, st = flows(x)
        return np.concatenate([np.abs(sf) ** 2, np.abs(st) ** 2])

    def angles(x):
        va = x[sl_va]
        return va[f] - va[t]

    def cost(x):
        pg_mw = x[sl_pg] * base
        c2 = np.array([g.c2 for g in gens])
        c1 = np.array([g.c1 for g in gens])
        c0 = np.array([g.c0 for g in gens])
        return float(np.sum(c2 * pg_mw**2 + c1 * pg_mw + c0))

    lo = np.concatenate(
        [
            np.full(nb, -np.pi),
            [b.vmin for b in case.buses],
            [g.pmin for g in gens],
            [g.qmin for g in gens],
        ]
    )
    hi = np.concatenate(
        [
            np.full(nb, np.pi),
            [b.vmax for b in case.buses],
            [g.pmax for g in gens],
            [g.qmax for g in gens],
        ]
    )
    x0 = np.concatenate(
        [
            np.zeros(nb),
            np.ones(nb),
            [0.5 * (g.pmin + g.pmax) for g in gens],
            [0.5 * (g.qmin + g.qmax) for g in gens],
        ]
    )

    rate = np.array([br.rate_a for br in branches])
    rate_ub = np.where(rate > 0, rate**2, np.inf)
    angmin = np.array([br.angmin for br in branches])
    angmax = np.array([br.angmax for br in branches])

    cons = [
        NonlinearConstraint(balance, 0.0, 0.0, jac="2-point"),
        NonlinearConstraint(thermal, -np.inf, np.concatenate([rate_ub, rate_ub]), jac="2-point"),
        NonlinearConstraint(angles, angmin, angmax, jac="2-point"),
    ]
    res = minimize(
        cost,
        x0,
        method="trust-constr",
        bounds=Bounds(lo, hi),
        constraints=cons,
        options={"gtol": 1e-10, "xtol": 1e-12, "maxiter": 3000, "verbose": 0},
    )
    return res


if __name__ == "__main__":
    case = parse_case_file("data/case5.m")
    res = dense_polar_opf(case)
    print("status:", res.status, res.message)
    print("objective: %.10e" % res.fun)
    print("max constraint violation:", res.constr_violation)
    with open("data/case5_reference_objective.txt", "w") as fh:
        fh.write(
            "%.10e\n" % res.fun
            + "# independent dense AC-OPF solve of case5.m (scipy trust-constr),\n"
            + "# produced by tests/oracle_case5_reference.py\n"
        )
    print("written data/case5_reference_objective.txt")
