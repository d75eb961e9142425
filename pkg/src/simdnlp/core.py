"""Declarative model construction.

A model is a set of variable blocks plus objective and constraint blocks.
Each objective/constraint block pairs one scalar kernel with one data table;
the block contributes one term per record.  Constraint augments add further
per-record terms into existing constraint rows, which is how quantities that
accumulate contributions from many devices (e.g. nodal power balances) are
expressed without giving up the one-kernel-per-block structure.

``ModelCore`` is the mutable registry used while building;
``ModelCore.compile()`` freezes everything into an immutable
``CompiledModel`` with precomputed derivative sparsity.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from typing import Any, Mapping

import numpy as np

from .expressions import Expr, Var, real_fields, var_slots

_INT_KINDS = ("i", "u")

# Strictly-inside push applied to out-of-bounds start values at compile time;
# interior-point consumers need starts that respect the bounds.
_START_PUSH = 1e-2


class ModelError(ValueError):
    """Raised for structural model-construction mistakes."""


class DataTable:
    """Homogeneous records stored column-major.

    Float columns become real fields, integer columns become index fields.
    All columns must have the same length (the record count).
    """

    def __init__(self, columns: Mapping[str, Any] | None = None):
        self.reals: dict[str, np.ndarray] = {}
        self.indices: dict[str, np.ndarray] = {}
        nrec = None
        for name, col in (columns or {}).items():
            arr = np.asarray(col)
            if arr.ndim != 1:
                raise ModelError(f"column {name!r} must be one-dimensional")
            if nrec is None:
                nrec = arr.shape[0]
            elif arr.shape[0] != nrec:
                raise ModelError(
                    f"column {name!r} has {arr.shape[0]} records, expected {nrec}"
                )
            if arr.dtype.kind in _INT_KINDS:
                self.indices[name] = arr.astype(np.int64)
            else:
                self.reals[name] = arr.astype(np.float64)
        self.nrec: int = 0 if nrec is None else int(nrec)

    def __len__(self) -> int:
        return self.nrec


@dataclass(eq=False)
class VariableBlock:
    """A contiguous range of decision variables with bounds and start values.

    ``shape`` is either ``(n,)`` or an ``(n, t)`` grid flattened row-major,
    so grid element ``(i, t)`` sits at flat position ``i * t_count + t``.
    """

    block_id: int
    offset: int
    shape: tuple[int, ...]
    lower: np.ndarray
    upper: np.ndarray
    start: np.ndarray
    name: str | None = None

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def __getitem__(self, index_column: str) -> Var:
        """Kernel reference to this block, indexed by an integer table column."""
        if not isinstance(index_column, str):
            raise TypeError("variable blocks are indexed by table column name")
        return Var(self, index_column)

    def flat(self, i, t=None) -> np.ndarray:
        """Flat within-block positions for element ``i`` (and period ``t``)."""
        i = np.asarray(i, dtype=np.int64)
        if len(self.shape) == 1:
            if t is not None:
                raise ModelError("1-D block indexed with a period")
            return i
        if t is None:
            raise ModelError("grid block requires a period index")
        return i * self.shape[1] + np.asarray(t, dtype=np.int64)


@dataclass(eq=False)
class ObjectiveBlock:
    kernel: Expr
    table: DataTable


@dataclass(eq=False)
class ConstraintBlock:
    kernel: Expr
    table: DataTable
    lower: np.ndarray
    upper: np.ndarray
    row_offset: int

    @property
    def nrows(self) -> int:
        return self.table.nrec

    def rows(self) -> np.ndarray:
        """Global row indices of this block."""
        return self.row_offset + np.arange(self.nrows, dtype=np.int64)


@dataclass(eq=False)
class ConstraintAugment:
    """Per-record terms summed into existing constraint rows.

    The table's mandatory integer field ``row`` holds the global row each
    record adds into; bounds of the target rows are never touched.
    """

    kernel: Expr
    table: DataTable
    target: ConstraintBlock


def _broadcast(value, size: int, what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        return np.full(size, float(arr))
    if arr.ndim == 1 and arr.shape[0] == size:
        return arr.copy()
    raise ModelError(f"{what} has length {arr.shape}, expected scalar or {size}")


class ModelCore:
    """Mutable model registry; single-owner during construction."""

    def __init__(self) -> None:
        self.variables: list[VariableBlock] = []
        self.objectives: list[ObjectiveBlock] = []
        self.constraints: list[ConstraintBlock] = []
        self.augments: list[ConstraintAugment] = []
        # Constraint-side terms (blocks and augments) in registration order;
        # fixes the sequential accumulation order of row values.
        self.con_terms: list[ConstraintBlock | ConstraintAugment] = []
        self.nvar = 0
        self.ncon = 0

    def add_variable(
        self,
        shape,
        lower=-np.inf,
        upper=np.inf,
        start=0.0,
        name: str | None = None,
    ) -> VariableBlock:
        if isinstance(shape, (int, np.integer)):
            shape = (int(shape),)
        else:
            shape = tuple(int(s) for s in shape)
        if len(shape) not in (1, 2) or any(s <= 0 for s in shape):
            raise ModelError(f"invalid variable shape {shape}")
        size = int(np.prod(shape))
        lo = _broadcast(np.ravel(lower) if np.ndim(lower) > 1 else lower, size, "lower bound")
        hi = _broadcast(np.ravel(upper) if np.ndim(upper) > 1 else upper, size, "upper bound")
        x0 = _broadcast(np.ravel(start) if np.ndim(start) > 1 else start, size, "start")
        if np.any(lo > hi):
            bad = int(np.argmax(lo > hi))
            raise ModelError(f"lower > upper at element {bad} of variable block")
        block = VariableBlock(len(self.variables), self.nvar, shape, lo, hi, x0, name)
        self.variables.append(block)
        self.nvar += size
        return block

    def _check_kernel(self, kernel: Expr, table: DataTable, what: str) -> None:
        missing = real_fields(kernel) - set(table.reals)
        if missing:
            raise ModelError(f"{what} kernel references unknown fields {sorted(missing)}")
        for block, index in var_slots(kernel):
            if block.block_id >= len(self.variables) or self.variables[block.block_id] is not block:
                raise ModelError(f"{what} kernel references a variable block not in this core")
            if index not in table.indices:
                raise ModelError(f"{what} kernel indexes variables by unknown column {index!r}")
            col = table.indices[index]
            if col.size and (col.min() < 0 or col.max() >= block.size):
                raise ModelError(
                    f"{what} index column {index!r} out of range for block of size {block.size}"
                )

    def add_objective(self, kernel: Expr, table: DataTable) -> ObjectiveBlock:
        self._check_kernel(kernel, table, "objective")
        block = ObjectiveBlock(kernel, table)
        self.objectives.append(block)
        return block

    def add_constraint(self, kernel: Expr, table: DataTable, lb=0.0, ub=0.0) -> ConstraintBlock:
        self._check_kernel(kernel, table, "constraint")
        lo = _broadcast(lb, table.nrec, "constraint lower bound")
        hi = _broadcast(ub, table.nrec, "constraint upper bound")
        if np.any(lo > hi):
            bad = int(np.argmax(lo > hi))
            raise ModelError(f"constraint lower > upper at record {bad}")
        block = ConstraintBlock(kernel, table, lo, hi, self.ncon)
        self.constraints.append(block)
        self.con_terms.append(block)
        self.ncon += table.nrec
        return block

    def modify_constraint(
        self, block: ConstraintBlock, kernel: Expr, table: DataTable
    ) -> ConstraintAugment:
        """Add per-record kernel values into existing rows of ``block``."""
        if block not in self.constraints:
            raise ModelError("augment targets a constraint block not in this core")
        if "row" not in table.indices:
            raise ModelError("augment table needs an integer field 'row'")
        self._check_kernel(kernel, table, "augment")
        rows = table.indices["row"]
        if rows.size and (
            rows.min() < block.row_offset or rows.max() >= block.row_offset + block.nrows
        ):
            raise ModelError(
                f"augment row outside target block range "
                f"[{block.row_offset}, {block.row_offset + block.nrows})"
            )
        aug = ConstraintAugment(kernel, table, block)
        self.augments.append(aug)
        self.con_terms.append(aug)
        return aug

    def compile(self) -> "CompiledModel":
        """Freeze the registered content into an immutable evaluable model."""
        from .autodiff import build_plan

        t0 = time.perf_counter()
        if self.nvar == 0:
            raise ModelError("cannot compile a model without variables")
        lower = np.concatenate([b.lower for b in self.variables])
        upper = np.concatenate([b.upper for b in self.variables])
        start = _clamp_start(
            np.concatenate([b.start for b in self.variables]), lower, upper
        )
        if self.ncon:
            con_lower = np.concatenate([c.lower for c in self.constraints])
            con_upper = np.concatenate([c.upper for c in self.constraints])
        else:
            con_lower = np.zeros(0)
            con_upper = np.zeros(0)
        plan = build_plan(self)
        model = CompiledModel(
            nvar=self.nvar,
            ncon=self.ncon,
            lower=lower,
            upper=upper,
            start=start,
            con_lower=con_lower,
            con_upper=con_upper,
            variables=tuple(self.variables),
            objectives=tuple(self.objectives),
            constraints=tuple(self.constraints),
            augments=tuple(self.augments),
            plan=plan,
        )
        model.build_seconds = time.perf_counter() - t0
        return model


def new_core() -> ModelCore:
    return ModelCore()


def _clamp_start(start: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Project out-of-bounds starts strictly inside finite bounds."""
    push = np.minimum(_START_PUSH * (upper - lower), _START_PUSH)
    push = np.where(np.isfinite(push), push, _START_PUSH)
    out = start.copy()
    low_viol = out < lower
    out[low_viol] = (lower + push)[low_viol]
    high_viol = out > upper
    out[high_viol] = (upper - push)[high_viol]
    return out


@dataclass(eq=False)
class CompiledModel:
    """Immutable flattened model implementing the evaluation callback contract.

    Evaluation entry points live in :mod:`simdnlp.autodiff`; the thin methods
    here delegate to them.  All evaluation state is caller-provided, so one
    compiled model can be shared across threads.
    """

    nvar: int
    ncon: int
    lower: np.ndarray
    upper: np.ndarray
    start: np.ndarray
    con_lower: np.ndarray
    con_upper: np.ndarray
    variables: tuple[VariableBlock, ...]
    objectives: tuple[ObjectiveBlock, ...]
    constraints: tuple[ConstraintBlock, ...]
    augments: tuple[ConstraintAugment, ...]
    plan: Any
    build_seconds: float = dc_field(default=0.0, compare=False)

    def objective(self, x: np.ndarray) -> float:
        from .autodiff import eval_objective

        return eval_objective(self, x)

    def gradient(self, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        from .autodiff import eval_gradient

        if out is None:
            out = np.empty(self.nvar)
        eval_gradient(self, x, out)
        return out

    def constraints_value(self, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        from .autodiff import eval_constraints

        if out is None:
            out = np.empty(self.ncon)
        eval_constraints(self, x, out)
        return out

    def jacobian(self, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        from .autodiff import eval_jacobian

        if out is None:
            out = np.empty(self.plan.n_jac_slots)
        eval_jacobian(self, x, out)
        return out

    def hessian(
        self,
        x: np.ndarray,
        mult: np.ndarray,
        obj_weight: float = 1.0,
        out: np.ndarray | None = None,
    ) -> np.ndarray:
        from .autodiff import eval_hessian

        if out is None:
            out = np.empty(self.plan.n_hess_slots)
        eval_hessian(self, x, mult, obj_weight, out)
        return out


def extract_solution(x_flat: np.ndarray, block: VariableBlock) -> np.ndarray:
    """Values of ``block`` within a full solution vector, in declared shape."""
    x_flat = np.asarray(x_flat, dtype=np.float64)
    if x_flat.ndim != 1 or x_flat.shape[0] < block.offset + block.size:
        raise ModelError(
            f"solution vector of length {x_flat.shape} cannot hold block at "
            f"offset {block.offset} with size {block.size}"
        )
    return x_flat[block.offset : block.offset + block.size].reshape(block.shape).copy()

