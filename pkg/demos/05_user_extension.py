"""Extend a built model through the user callback hook.

The callback runs after the base model is registered but before it is
compiled, with full access to the core and the named variable/constraint
blocks.  Here an electrolyzer-style flexible load is attached to bus 3:
a new variable block, an extra objective term rewarding hydrogen output,
and an augmentation of the bus's active power balance.
"""

from pathlib import Path

import numpy as np

from simdnlp import DataTable, extract_solution, field, opf_model, solve

data = Path(__file__).resolve().parent.parent / "data"

H2_VALUE = 33.0  # $ per MWh-equivalent consumed; above bus 3's ~30 $/MWh price
BUS_POS = 2  # bus 3 in the 5-bus case


def add_electrolyzer(core, vars_ns, cons_ns):
    ely = core.add_variable(1, lower=0.0, upper=0.5, name="ely")

    # reward hydrogen production (negative cost on consumed power, MW domain)
    core.add_objective(
        -field("value") * ely["i"] * 100.0,
        DataTable({"i": np.array([0]), "value": np.array([H2_VALUE])}),
    )

    # the electrolyzer draws from bus 3's active power balance
    balance = cons_ns.c_active_power_balance
    core.modify_constraint(
        balance,
        -ely["i"],
        DataTable({"i": np.array([0]), "row": np.array([balance.row_offset + BUS_POS])}),
    )
    return {"ely": ely}, {}


base_model, _, _ = opf_model(data / "case5.m")
base = solve(base_model)

model, vars_ns, cons_ns = opf_model(data / "case5.m", user_callback=add_electrolyzer)
result = solve(model)

print(f"base objective:     {base.objective:.4f}")
print(f"extended objective: {result.objective:.4f} ({result.status})")
print("electrolyzer draw (per-unit):", extract_solution(result.x, vars_ns.ely))
print(f"model grew from {base_model.nvar} to {model.nvar} variables")
