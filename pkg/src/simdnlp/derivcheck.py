"""Finite-difference validation of the derivative callbacks.

Central differences with per-coordinate steps scaled by (1 + |x_i|).  The
Hessian check differentiates the AD gradient and multiplier-weighted AD
Jacobian rows, so each order is validated against one order lower.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import (
    compress_coordinates,
    eval_constraints,
    eval_gradient,
    eval_jacobian,
    eval_objective,
    hessian_structure,
    jacobian_structure,
)
from .core import CompiledModel

DEFAULT_STEP = 1e-6


def random_interior_point(model: CompiledModel, rng: np.random.Generator) -> np.ndarray:
    """A random point strictly inside the variable bounds, near the start.

    Bounded coordinates are sampled well inside their interval; unbounded
    ones jitter around the (already bound-clamped) start point.  Fixed
    variables stay put.
    """
    lo, hi = model.lower, model.upper
    width = hi - lo
    x = model.start.copy()
    u = rng.uniform(-1.0, 1.0, size=model.nvar)

    both = np.isfinite(lo) & np.isfinite(hi)
    x[both] = (0.5 * (lo[both] + hi[both]) + 0.3 * u[both] * width[both])
    loose = ~both
    x[loose] = (model.start + 0.3 * u)[loose]
    return np.clip(x, lo, hi)


def fd_gradient(model: CompiledModel, x: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    g = np.empty(model.nvar)
    for i in range(model.nvar):
        h = step * (1.0 + abs(x[i]))
        xp = x.copy()
        xp[i] = x[i] + h
        xm = x.copy()
        xm[i] = x[i] - h
        g[i] = (eval_objective(model, xp) - eval_objective(model, xm)) / (2.0 * h)
    return g


def fd_jacobian(model: CompiledModel, x: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    jac = np.zeros((model.ncon, model.nvar))
    cp = np.empty(model.ncon)
    cm = np.empty(model.ncon)
    for i in range(model.nvar):
        h = step * (1.0 + abs(x[i]))
        xp = x.copy()
        xp[i] = x[i] + h
        xm = x.copy()
        xm[i] = x[i] - h
        eval_constraints(model, xp, cp)
        eval_constraints(model, xm, cm)
        jac[:, i] = (cp - cm) / (2.0 * h)
    return jac


def _lagrangian_gradient(model, x, mult, obj_weight, jpat) -> np.ndarray:
    g = np.empty(model.nvar)
    eval_gradient(model, x, g)
    g *= obj_weight
    if model.ncon:
        raw = np.empty(model.plan.n_jac_slots)
        eval_jacobian(model, x, raw)
        vals = jpat.sum_values(raw)
        g += np.bincount(jpat.cols, weights=vals * mult[jpat.rows], minlength=model.nvar)
    return g


def fd_lagrangian_hessian(
    model: CompiledModel,
    x: np.ndarray,
    mult: np.ndarray,
    obj_weight: float = 1.0,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Dense symmetric FD Hessian of obj_weight * f + mult . g."""
    jpat = compress_coordinates(*jacobian_structure(model))
    hess = np.zeros((model.nvar, model.nvar))
    for i in range(model.nvar):
        h = step * (1.0 + abs(x[i]))
        xp = x.copy()
        xp[i] = x[i] + h
        xm = x.copy()
        xm[i] = x[i] - h
        gp = _lagrangian_gradient(model, xp, mult, obj_weight, jpat)
        gm = _lagrangian_gradient(model, xm, mult, obj_weight, jpat)
        hess[:, i] = (gp - gm) / (2.0 * h)
    return 0.5 * (hess + hess.T)


def ad_jacobian_dense(model: CompiledModel, x: np.ndarray) -> np.ndarray:
    jpat = compress_coordinates(*jacobian_structure(model))
    dense = np.zeros((model.ncon, model.nvar))
    if model.ncon:
        raw = np.empty(model.plan.n_jac_slots)
        eval_jacobian(model, x, raw)
        dense[jpat.rows, jpat.cols] = jpat.sum_values(raw)
    return dense


def ad_hessian_dense(
    model: CompiledModel, x: np.ndarray, mult: np.ndarray, obj_weight: float = 1.0
) -> np.ndarray:
    from .autodiff import eval_hessian

    hpat = compress_coordinates(*hessian_structure(model))
    raw = np.empty(model.plan.n_hess_slots)
    eval_hessian(model, x, mult, obj_weight, raw)
    vals = hpat.sum_values(raw)
    dense = np.zeros((model.nvar, model.nvar))
    dense[hpat.rows, hpat.cols] = vals
    dense = dense + dense.T - np.diag(np.diag(dense))
    return dense


@dataclass
class DiffReport:
    """Worst relative FD mismatch per derivative order."""

    grad_err: float
    grad_coord: tuple[int, ...]
    jac_err: float
    jac_coord: tuple[int, ...]
    hess_err: float
    hess_coord: tuple[int, ...]

    def worst(self) -> float:
        return max(self.grad_err, self.jac_err, self.hess_err)


def _rel_err(ad: np.ndarray, fd: np.ndarray) -> tuple[float, tuple[int, ...]]:
    if ad.size == 0:
        return 0.0, ()
    scale = max(1.0, float(np.abs(fd).max()))
    diff = np.abs(ad - fd)
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]) / scale, tuple(int(i) for i in idx)


def check_derivatives(
    model: CompiledModel,
    points: int = 5,
    seed: int = 0,
    step: float = DEFAULT_STEP,
    rng: np.random.Generator | None = None,
) -> DiffReport:
    """Compare AD gradient/Jacobian/Hessian with central differences at
    random interior points; returns the worst relative error of each."""
    rng = rng or np.random.default_rng(seed)
    worst = DiffReport(0.0, (), 0.0, (), 0.0, ())
    g = np.empty(model.nvar)
    for _ in range(points):
        x = random_interior_point(model, rng)
        mult = rng.uniform(-1.0, 1.0, size=model.ncon)

        eval_gradient(model, x, g)
        err, coord = _rel_err(g, fd_gradient(model, x, step))
        if err > worst.grad_err:
            worst.grad_err, worst.grad_coord = err, coord

        err, coord = _rel_err(ad_jacobian_dense(model, x), fd_jacobian(model, x, step))
        if err > worst.jac_err:
            worst.jac_err, worst.jac_coord = err, coord

        err, coord = _rel_err(
            ad_hessian_dense(model, x, mult),
            fd_lagrangian_hessian(model, x, mult, 1.0, step),
        )
        if err > worst.hess_err:
            worst.hess_err, worst.hess_coord = err, coord
    return worst


def pattern_covers_fd(
    model: CompiledModel, x: np.ndarray, threshold: float = 1e-8
) -> tuple[bool, int, bool, int]:
    """Check that the declared patterns cover every dense-FD nonzero.

    Returns (jac_ok, jac_missing, hess_ok, hess_missing).
    """
    jpat = compress_coordinates(*jacobian_structure(model))
    declared_j = set(zip(jpat.rows.tolist(), jpat.cols.tolist()))
    fd_j = fd_jacobian(model, x)
    jac_missing = 0
    for r, cc in zip(*np.nonzero(np.abs(fd_j) > threshold)):
        if (int(r), int(cc)) not in declared_j:
            jac_missing += 1

    hpat = compress_coordinates(*hessian_structure(model))
    declared_h = set(zip(hpat.rows.tolist(), hpat.cols.tolist()))
    mult = np.ones(model.ncon)
    fd_h = fd_lagrangian_hessian(model, x, mult)
    hess_missing = 0
    for r, cc in zip(*np.nonzero(np.abs(np.tril(fd_h)) > threshold)):
        if (int(r), int(cc)) not in declared_h:
            hess_missing += 1
    return jac_missing == 0, jac_missing, hess_missing == 0, hess_missing
