"""Build a model from kernels over tables and query its derivatives.

The chained Luksan-Vlcek test problem: one constraint kernel applied to
n-2 records, one objective kernel applied to n-1 records.  Every record
is one term; derivatives come out as sparse structures assembled term by
term.
"""

import numpy as np

from simdnlp import (
    DataTable,
    ModelCore,
    compress_coordinates,
    eval_constraints,
    eval_gradient,
    eval_objective,
    hessian_structure,
    jacobian_structure,
    sin,
    exp,
)

n = 8
core = ModelCore()
start = np.where(np.arange(1, n + 1) % 2 == 1, -1.2, 1.0)
x = core.add_variable(n, start=start, name="x")

# one scalar kernel + one table = one constraint block of n-2 rows
i = np.arange(n - 2)
core.add_constraint(
    3.0 * x["i1"] ** 3 + 2.0 * x["i2"] - 5.0
    + sin(x["i1"] - x["i2"]) * sin(x["i1"] + x["i2"])
    + 4.0 * x["i1"] - x["i0"] * exp(x["i0"] - x["i1"]) - 3.0,
    DataTable({"i0": i, "i1": i + 1, "i2": i + 2}),
)

j = np.arange(1, n)
core.add_objective(
    100.0 * (x["a"] ** 2 - x["b"]) ** 2 + (x["a"] - 1.0) ** 2,
    DataTable({"a": j - 1, "b": j}),
)

model = core.compile()
print(f"compiled: nvar={model.nvar} ncon={model.ncon}")

x0 = model.start
print("objective at start:", eval_objective(model, x0))

g = np.empty(model.nvar)
eval_gradient(model, x0, g)
print("gradient at start:", np.round(g, 3))

c = np.empty(model.ncon)
eval_constraints(model, x0, c)
print("constraint rows at start:", np.round(c, 3))

jr, jc = jacobian_structure(model)
print(f"jacobian: {jr.size} slots (duplicates allowed)")
jpat = compress_coordinates(jr, jc)
print(f"          {jpat.nnz} distinct coordinates after compression")

hr, hc = hessian_structure(model)
hpat = compress_coordinates(hr, hc)
print(f"hessian:  {hr.size} slots, {hpat.nnz} distinct lower-triangle coordinates")

vals = model.jacobian(x0)
print("first jacobian slot values:", np.round(vals[:5], 3))
