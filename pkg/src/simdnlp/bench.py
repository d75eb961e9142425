"""Benchmark summaries: run records and shifted-geometric-mean statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solver import Timings


def shifted_geometric_mean(values, shift: float = 10.0) -> float:
    """(prod(v_i + shift))^(1/n) - shift; shift 0 is the plain geometric mean."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("shifted geometric mean of an empty sample")
    if np.any(vals + shift <= 0.0):
        raise ValueError("sample values must satisfy v + shift > 0")
    return float(np.exp(np.mean(np.log(vals + shift))) - shift)


@dataclass
class RunRecord:
    """One (case, configuration) benchmark outcome."""

    case: str
    form: str
    periods: int
    tol: float
    status: str
    objective: float
    iterations: int
    wall_seconds: float
    constraint_violation: float
    complementarity_violation: float | None
    timings: Timings

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "form": self.form,
            "periods": self.periods,
            "tol": self.tol,
            "status": self.status,
            "objective": self.objective,
            "iterations": self.iterations,
            "wall_seconds": self.wall_seconds,
            "constraint_violation": self.constraint_violation,
            "complementarity_violation": self.complementarity_violation,
            "timings": {
                "build_seconds": self.timings.build_seconds,
                "init_seconds": self.timings.init_seconds,
                "ad_seconds": self.timings.ad_seconds,
                "linsolve_seconds": self.timings.linsolve_seconds,
                "internal_seconds": self.timings.internal_seconds,
            },
        }

    def to_line(self) -> str:
        compl = "-" if self.complementarity_violation is None else repr(
            self.complementarity_violation
        )
        return (
            f"case={self.case} form={self.form} T={self.periods} tol={self.tol:g} "
            f"status={self.status} objective={self.objective!r} iters={self.iterations} "
            f"wall={self.wall_seconds:.3f} cvio={self.constraint_violation!r} compl={compl}"
        )


def summarize_runs(records: list[RunRecord], time_limit: float, shift: float = 10.0) -> dict:
    """Solved count plus SGM time and SGM constraint violation.

    Unsolved cases enter the time statistic at the time limit and are left
    out of the violation statistic.
    """
    solved = [r for r in records if r.status == "optimal"]
    times = [r.wall_seconds if r.status == "optimal" else time_limit for r in records]
    out = {
        "solved": len(solved),
        "total": len(records),
        "sgm_time": shifted_geometric_mean(times, shift) if records else None,
        "sgm_constraint_violation": (
            shifted_geometric_mean([r.constraint_violation for r in solved], shift)
            if solved
            else None
        ),
    }
    return out
