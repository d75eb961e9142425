"""Power-agnostic reference models used by tests, demos, and the CLI."""

from __future__ import annotations

from types import SimpleNamespace

import numpy as np

from .core import CompiledModel, DataTable, ModelCore
from .expressions import exp, sin


def luksan_vlcek_model(n: int) -> tuple[CompiledModel, SimpleNamespace, SimpleNamespace]:
    """Chained nonconvex test problem of size ``n``.

    Starts alternate -1.2 / 1.0 (odd/even 1-based positions).  Each of the
    n-2 equality rows couples three consecutive variables; each of the n-1
    objective terms couples two.
    """
    if n < 3:
        raise ValueError("luksan_vlcek_model needs n >= 3")
    core = ModelCore()
    start = np.where(np.arange(1, n + 1) % 2 == 1, -1.2, 1.0)
    x = core.add_variable(n, start=start, name="x")

    i = np.arange(n - 2)
    con = core.add_constraint(
        3.0 * x["i1"] ** 3
        + 2.0 * x["i2"]
        - 5.0
        + sin(x["i1"] - x["i2"]) * sin(x["i1"] + x["i2"])
        + 4.0 * x["i1"]
        - x["i0"] * exp(x["i0"] - x["i1"])
        - 3.0,
        DataTable({"i0": i, "i1": i + 1, "i2": i + 2}),
    )

    j = np.arange(1, n)
    core.add_objective(
        100.0 * (x["a"] ** 2 - x["b"]) ** 2 + (x["a"] - 1.0) ** 2,
        DataTable({"a": j - 1, "b": j}),
    )

    model = core.compile()
    return model, SimpleNamespace(x=x), SimpleNamespace(residual=con)
