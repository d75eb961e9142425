from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def solved():
    """Session cache of static OPF solves keyed by (case, form)."""
    from simdnlp import opf_model, solve

    cache: dict = {}

    def get(case: str, form: str = "polar"):
        key = (case, form)
        if key not in cache:
            model, vars_ns, cons_ns = opf_model(DATA / f"{case}.m", form=form)
            cache[key] = (model, vars_ns, cons_ns, solve(model))
        return cache[key]

    return get
