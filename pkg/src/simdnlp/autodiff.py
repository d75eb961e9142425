"""Derivative evaluation for compiled models.

Every objective/constraint block is differentiated term-by-term: the block's
kernel is compiled once into a replayable tape, and each pass (value,
reverse-mode adjoint, forward-over-reverse second order) runs vectorized over
all records of the block's table.  Results aggregate into global structures:

* gradient         -- dense, accumulated over objective terms
* Jacobian         -- COO slots, one slot per (record, variable-slot) pair
* Hessian          -- COO lower triangle over each term's local variables

Coordinate lists are x-independent and may contain duplicates (one slot per
term occurrence); :func:`compress_coordinates` deduplicates and returns the
slot-to-compressed mapping for consumers that need summed entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .expressions import Binary, Const, Expr, Field, Unary, Var, var_slots

if TYPE_CHECKING:
    from .core import CompiledModel, ModelCore


class EvalDomainError(ArithmeticError):
    """Numeric-domain violation (log/sqrt/div/pow) during kernel evaluation."""

    def __init__(self, op: str, record: int, kind: str = "?", block_index: int = -1):
        self.op = op
        self.record = record
        self.kind = kind
        self.block_index = block_index
        super().__init__(op, record)

    def located(self, kind: str, block_index: int) -> "EvalDomainError":
        return EvalDomainError(self.op, self.record, kind, block_index)

    def __str__(self) -> str:
        return (
            f"domain error in {self.op!r} at {self.kind} block "
            f"{self.block_index}, record {self.record}"
        )


def _first_bad(mask) -> int:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return -1  # scalar operand: every record is affected
    return int(np.flatnonzero(mask)[0])


def _check_positive(arr, op: str) -> None:
    bad = ~(np.asarray(arr) > 0.0)
    if np.any(bad):
        raise EvalDomainError(op, _first_bad(bad))


def _check_nonzero(arr, op: str) -> None:
    bad = np.asarray(arr) == 0.0
    if np.any(bad):
        raise EvalDomainError(op, _first_bad(bad))


def _is_zero(t) -> bool:
    return isinstance(t, float) and t == 0.0


class TermTape:
    """Replayable tape for one kernel: topological node order plus the
    ordered set of distinct variable slots the kernel references."""

    def __init__(self, kernel: Expr):
        self.kernel = kernel
        self.slots = var_slots(kernel)  # [(block, index_column)] first-use order
        self.k = len(self.slots)
        slot_pos = {(id(b), idx): s for s, (b, idx) in enumerate(self.slots)}

        # Flatten the tree (children before parents, shared subtrees once)
        # into simple instructions interpreted by the passes below.
        order: list[Expr] = []
        seen: set[int] = set()
        stack: list[tuple[Expr, bool]] = [(kernel, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            if isinstance(node, Unary):
                stack.append((node.child, False))
            elif isinstance(node, Binary):
                stack.append((node.rhs, False))
                stack.append((node.lhs, False))

        pos = {id(n): p for p, n in enumerate(order)}
        instr: list[tuple] = []
        for n in order:
            if isinstance(n, Const):
                instr.append(("const", n.value))
            elif isinstance(n, Field):
                instr.append(("field", n.name))
            elif isinstance(n, Var):
                instr.append(("var", slot_pos[(id(n.block), n.index)]))
            elif isinstance(n, Unary):
                instr.append((n.op, pos[id(n.child)]))
            else:
                assert isinstance(n, Binary)
                a, b = pos[id(n.lhs)], pos[id(n.rhs)]
                if n.op == "pow" and isinstance(n.rhs, Const) and float(n.rhs.value).is_integer():
                    instr.append(("ipow", a, int(n.rhs.value)))
                else:
                    instr.append((n.op, a, b))
        self.instr = instr
        self.root = len(instr) - 1

    # ------------------------------------------------------------------
    # value pass
    # ------------------------------------------------------------------
    def values(self, x: np.ndarray, reals: dict, cols: list[np.ndarray]) -> list:
        v: list = [None] * len(self.instr)
        for p, ins in enumerate(self.instr):
            op = ins[0]
            if op == "const":
                v[p] = ins[1]
            elif op == "field":
                v[p] = reals[ins[1]]
            elif op == "var":
                v[p] = x[cols[ins[1]]]
            elif op == "neg":
                v[p] = -v[ins[1]]
            elif op == "sin":
                v[p] = np.sin(v[ins[1]])
            elif op == "cos":
                v[p] = np.cos(v[ins[1]])
            elif op == "exp":
                v[p] = np.exp(v[ins[1]])
            elif op == "log":
                _check_positive(v[ins[1]], "log")
                v[p] = np.log(v[ins[1]])
            elif op == "sqrt":
                _check_positive(v[ins[1]], "sqrt")
                v[p] = np.sqrt(v[ins[1]])
            elif op == "add":
                v[p] = v[ins[1]] + v[ins[2]]
            elif op == "sub":
                v[p] = v[ins[1]] - v[ins[2]]
            elif op == "mul":
                v[p] = v[ins[1]] * v[ins[2]]
            elif op == "div":
                _check_nonzero(v[ins[2]], "div")
                v[p] = v[ins[1]] / v[ins[2]]
            elif op == "ipow":
                n = ins[2]
                if n < 0:
                    _check_nonzero(v[ins[1]], "pow")
                v[p] = np.power(v[ins[1]], n) if n != 2 else v[ins[1]] * v[ins[1]]
            else:  # general pow: non-integer exponent needs a positive base
                _check_positive(v[ins[1]], "pow")
                v[p] = np.power(v[ins[1]], v[ins[2]])
        return v

    # ------------------------------------------------------------------
    # reverse pass: adjoints of every node, then per-slot sums
    # ------------------------------------------------------------------
    def adjoints(self, v: list, nrec: int) -> list:
        adj: list = [None] * len(self.instr)
        adj[self.root] = np.ones(nrec)
        for p in range(len(self.instr) - 1, -1, -1):
            a_p = adj[p]
            if a_p is None:
                continue
            ins = self.instr[p]
            op = ins[0]
            if op in ("const", "field", "var"):
                continue
            if op == "neg":
                _acc(adj, ins[1], -a_p)
            elif op == "sin":
                _acc(adj, ins[1], a_p * np.cos(v[ins[1]]))
            elif op == "cos":
                _acc(adj, ins[1], -a_p * np.sin(v[ins[1]]))
            elif op == "exp":
                _acc(adj, ins[1], a_p * v[p])
            elif op == "log":
                _acc(adj, ins[1], a_p / v[ins[1]])
            elif op == "sqrt":
                _acc(adj, ins[1], a_p / (2.0 * v[p]))
            elif op == "add":
                _acc(adj, ins[1], a_p)
                _acc(adj, ins[2], a_p)
            elif op == "sub":
                _acc(adj, ins[1], a_p)
                _acc(adj, ins[2], -a_p)
            elif op == "mul":
                _acc(adj, ins[1], a_p * v[ins[2]])
                _acc(adj, ins[2], a_p * v[ins[1]])
            elif op == "div":
                _acc(adj, ins[1], a_p / v[ins[2]])
                _acc(adj, ins[2], -a_p * v[p] / v[ins[2]])
            elif op == "ipow":
                n = ins[2]
                if n != 0:
                    if n - 1 < 0:
                        _check_nonzero(v[ins[1]], "pow")
                    _acc(adj, ins[1], a_p * n * np.power(v[ins[1]], n - 1))
            else:  # pow
                base, ex = v[ins[1]], v[ins[2]]
                _acc(adj, ins[1], a_p * ex * v[p] / base)
                _acc(adj, ins[2], a_p * v[p] * np.log(base))
        return adj

    def slot_sums(self, per_node: list, nrec: int) -> list[np.ndarray]:
        """Sum a per-node quantity over the Var leaves of each slot."""
        out = [np.zeros(nrec) for _ in range(self.k)]
        for p, ins in enumerate(self.instr):
            if ins[0] == "var" and per_node[p] is not None:
                out[ins[1]] = out[ins[1]] + per_node[p]
        return out

    # ------------------------------------------------------------------
    # forward tangents for one seed slot
    # ------------------------------------------------------------------
    def tangents(self, v: list, seed: int) -> list:
        t: list = [0.0] * len(self.instr)
        for p, ins in enumerate(self.instr):
            op = ins[0]
            if op == "var":
                t[p] = 1.0 if ins[1] == seed else 0.0
            elif op in ("const", "field"):
                t[p] = 0.0
            elif op == "neg":
                ta = t[ins[1]]
                t[p] = 0.0 if _is_zero(ta) else -ta
            elif op == "sin":
                ta = t[ins[1]]
                t[p] = 0.0 if _is_zero(ta) else np.cos(v[ins[1]]) * ta
            elif op == "cos":
                ta = t[ins[1]]
                t[p] = 0.0 if _is_zero(ta) else -np.sin(v[ins[1]]) * ta
            elif op == "exp":
                ta = t[ins[1]]
                t[p] = 0.0 if _is_zero(ta) else v[p] * ta
            elif op == "log":
                ta = t[ins[1]]
                t[p] = 0.0 if _is_zero(ta) else ta / v[ins[1]]
            elif op == "sqrt":
                ta = t[ins[1]]
                t[p] = 0.0 if _is_zero(ta) else ta / (2.0 * v[p])
            elif op == "add":
                ta, tb = t[ins[1]], t[ins[2]]
                t[p] = tb if _is_zero(ta) else (ta if _is_zero(tb) else ta + tb)
            elif op == "sub":
                ta, tb = t[ins[1]], t[ins[2]]
                if _is_zero(tb):
                    t[p] = ta
                elif _is_zero(ta):
                    t[p] = -tb
                else:
                    t[p] = ta - tb
            elif op == "mul":
                ta, tb = t[ins[1]], t[ins[2]]
                left = 0.0 if _is_zero(ta) else ta * v[ins[2]]
                right = 0.0 if _is_zero(tb) else v[ins[1]] * tb
                t[p] = left + right if not (_is_zero(left) and _is_zero(right)) else 0.0
            elif op == "div":
                ta, tb = t[ins[1]], t[ins[2]]
                if _is_zero(ta) and _is_zero(tb):
                    t[p] = 0.0
                else:
                    left = 0.0 if _is_zero(ta) else ta / v[ins[2]]
                    right = 0.0 if _is_zero(tb) else v[p] * tb / v[ins[2]]
                    t[p] = left - right
            elif op == "ipow":
                ta, n = t[ins[1]], ins[2]
                if _is_zero(ta) or n == 0:
                    t[p] = 0.0
                else:
                    t[p] = n * np.power(v[ins[1]], n - 1) * ta
            else:  # pow
                ta, tb = t[ins[1]], t[ins[2]]
                if _is_zero(ta) and _is_zero(tb):
                    t[p] = 0.0
                else:
                    base, ex = v[ins[1]], v[ins[2]]
                    d = 0.0 if _is_zero(ta) else ex * ta / base
                    if not _is_zero(tb):
                        d = d + np.log(base) * tb
                    t[p] = v[p] * d
        return t

    # ------------------------------------------------------------------
    # second-order reverse: directional derivative of every adjoint
    # ------------------------------------------------------------------
    def adjoint_tangents(self, v: list, adj: list, t: list) -> list:
        dot: list = [None] * len(self.instr)
        dot[self.root] = 0.0
        for p in range(len(self.instr) - 1, -1, -1):
            a_p, d_p = adj[p], dot[p]
            if a_p is None:
                continue
            ins = self.instr[p]
            op = ins[0]
            if op in ("const", "field", "var"):
                continue
            if op == "neg":
                _accd(dot, ins[1], d_p, -1.0, a_p, 0.0)
            elif op == "sin":
                ta = t[ins[1]]
                pd = 0.0 if _is_zero(ta) else -np.sin(v[ins[1]]) * ta
                _accd(dot, ins[1], d_p, np.cos(v[ins[1]]), a_p, pd)
            elif op == "cos":
                ta = t[ins[1]]
                pd = 0.0 if _is_zero(ta) else -np.cos(v[ins[1]]) * ta
                _accd(dot, ins[1], d_p, -np.sin(v[ins[1]]), a_p, pd)
            elif op == "exp":
                _accd(dot, ins[1], d_p, v[p], a_p, t[p])
            elif op == "log":
                ta = t[ins[1]]
                pd = 0.0 if _is_zero(ta) else -ta / (v[ins[1]] * v[ins[1]])
                _accd(dot, ins[1], d_p, 1.0 / v[ins[1]], a_p, pd)
            elif op == "sqrt":
                pd = 0.0 if _is_zero(t[p]) else -t[p] / (2.0 * v[p] * v[p])
                _accd(dot, ins[1], d_p, 1.0 / (2.0 * v[p]), a_p, pd)
            elif op == "add":
                _accd(dot, ins[1], d_p, 1.0, a_p, 0.0)
                _accd(dot, ins[2], d_p, 1.0, a_p, 0.0)
            elif op == "sub":
                _accd(dot, ins[1], d_p, 1.0, a_p, 0.0)
                _accd(dot, ins[2], d_p, -1.0, a_p, 0.0)
            elif op == "mul":
                _accd(dot, ins[1], d_p, v[ins[2]], a_p, t[ins[2]])
                _accd(dot, ins[2], d_p, v[ins[1]], a_p, t[ins[1]])
            elif op == "div":
                b = v[ins[2]]
                ta, tb = t[ins[1]], t[ins[2]]
                pda = 0.0 if _is_zero(tb) else -tb / (b * b)
                if _is_zero(ta) and _is_zero(tb):
                    pdb = 0.0
                else:
                    pdb = -(0.0 if _is_zero(ta) else ta / (b * b))
                    if not _is_zero(tb):
                        pdb = pdb + 2.0 * v[p] * tb / (b * b)
                _accd(dot, ins[1], d_p, 1.0 / b, a_p, pda)
                _accd(dot, ins[2], d_p, -v[p] / b, a_p, pdb)
            elif op == "ipow":
                n = ins[2]
                if n == 0:
                    continue
                a = v[ins[1]]
                ta = t[ins[1]]
                part = n * np.power(a, n - 1)
                if n <= 1 or _is_zero(ta):
                    pd = 0.0
                else:
                    pd = n * (n - 1) * np.power(a, n - 2) * ta
                _accd(dot, ins[1], d_p, part, a_p, pd)
            else:  # pow
                a, b_ = v[ins[1]], v[ins[2]]
                ta, tb = t[ins[1]], t[ins[2]]
                pa = b_ * v[p] / a
                pb = v[p] * np.log(a)
                tp = t[p]
                # d/ds [b v / a] and d/ds [v ln a]
                pda = (0.0 if _is_zero(tb) else tb * v[p] / a)
                if not _is_zero(tp):
                    pda = pda + b_ * tp / a
                if not _is_zero(ta):
                    pda = pda - b_ * v[p] * ta / (a * a)
                pdb = 0.0 if _is_zero(tp) else tp * np.log(a)
                if not _is_zero(ta):
                    pdb = pdb + v[p] * ta / a
                _accd(dot, ins[1], d_p, pa, a_p, pda)
                _accd(dot, ins[2], d_p, pb, a_p, pdb)
        return dot


def _acc(store: list, pos: int, value) -> None:
    store[pos] = value if store[pos] is None else store[pos] + value


def _accd(store: list, pos: int, d_parent, partial, a_parent, partial_dot) -> None:
    contrib = 0.0 if _is_zero(d_parent) else d_parent * partial
    if not _is_zero(partial_dot):
        contrib = contrib + a_parent * partial_dot
    if store[pos] is None:
        store[pos] = contrib
    else:
        store[pos] = store[pos] + contrib


# ----------------------------------------------------------------------
# compile-time plan: terms, column arrays, COO layouts
# ----------------------------------------------------------------------


@dataclass(eq=False)
class HessPair:
    i: int
    j: int
    start: int
    dup: np.ndarray | None  # records where the two slots hit the same variable


@dataclass(eq=False)
class TermPlan:
    tape: TermTape
    reals: dict
    cols: list[np.ndarray]
    nrec: int
    kind: str
    block_index: int
    rows: np.ndarray | None = None
    row_offset: int | None = None  # set for base blocks (contiguous rows)
    jac_slices: list[tuple[int, int]] | None = None
    hess_pairs: list[HessPair] | None = None


@dataclass(eq=False)
class ModelPlan:
    obj_terms: list[TermPlan]
    con_terms: list[TermPlan]
    jac_rows: np.ndarray
    jac_cols: np.ndarray
    hess_rows: np.ndarray
    hess_cols: np.ndarray

    @property
    def n_jac_slots(self) -> int:
        return int(self.jac_rows.shape[0])

    @property
    def n_hess_slots(self) -> int:
        return int(self.hess_rows.shape[0])


def _term_plan(kernel, table, kind: str, index: int) -> TermPlan:
    tape = TermTape(kernel)
    cols = [
        block.offset + table.indices[idx]
        for block, idx in tape.slots
    ]
    return TermPlan(tape, dict(table.reals), cols, table.nrec, kind, index)


def build_plan(core: "ModelCore") -> ModelPlan:
    obj_terms = [
        _term_plan(b.kernel, b.table, "objective", i)
        for i, b in enumerate(core.objectives)
    ]
    con_terms = []
    for term in core.con_terms:
        from .core import ConstraintBlock  # late import to avoid a cycle

        if isinstance(term, ConstraintBlock):
            tp = _term_plan(term.kernel, term.table, "constraint", core.constraints.index(term))
            tp.row_offset = term.row_offset
            tp.rows = term.rows()
        else:
            tp = _term_plan(term.kernel, term.table, "augment", core.augments.index(term))
            tp.rows = term.table.indices["row"].copy()
        con_terms.append(tp)

    jr, jc = [], []
    pos = 0
    for tp in con_terms:
        tp.jac_slices = []
        for cols in tp.cols:
            jr.append(tp.rows)
            jc.append(cols)
            tp.jac_slices.append((pos, pos + tp.nrec))
            pos += tp.nrec

    hr, hc = [], []
    pos = 0
    for tp in obj_terms + con_terms:
        tp.hess_pairs = []
        k = tp.tape.k
        for i in range(k):
            fi = tp.cols[i]
            for j in range(i + 1):
                fj = tp.cols[j]
                hr.append(np.maximum(fi, fj))
                hc.append(np.minimum(fi, fj))
                dup = None
                if i != j:
                    eq = fi == fj
                    if np.any(eq):
                        dup = eq
                tp.hess_pairs.append(HessPair(i, j, pos, dup))
                pos += tp.nrec

    empty = np.zeros(0, dtype=np.int64)
    return ModelPlan(
        obj_terms=obj_terms,
        con_terms=con_terms,
        jac_rows=np.concatenate(jr) if jr else empty,
        jac_cols=np.concatenate(jc) if jc else empty,
        hess_rows=np.concatenate(hr) if hr else empty,
        hess_cols=np.concatenate(hc) if hc else empty,
    )


# ----------------------------------------------------------------------
# the five evaluation callbacks
# ----------------------------------------------------------------------


def _check_x(model: "CompiledModel", x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.nvar,):
        raise ValueError(f"x has shape {x.shape}, expected ({model.nvar},)")
    return x


def _term_values(tp: TermPlan, x: np.ndarray) -> list:
    try:
        return tp.tape.values(x, tp.reals, tp.cols)
    except EvalDomainError as err:
        raise err.located(tp.kind, tp.block_index) from None


def _root_as_records(root, nrec: int) -> np.ndarray:
    if np.ndim(root) == 0:
        return np.full(nrec, float(root))
    return root


def eval_objective(model: "CompiledModel", x: np.ndarray) -> float:
    """Total objective: sum over blocks and records, in registration order."""
    x = _check_x(model, x)
    total = 0.0
    for tp in model.plan.obj_terms:
        v = _term_values(tp, x)
        root = v[tp.tape.root]
        if np.ndim(root) == 0:
            total += float(root) * tp.nrec
        else:
            total += float(np.sum(root))
    return total


def eval_gradient(model: "CompiledModel", x: np.ndarray, out_g: np.ndarray) -> None:
    """Dense objective gradient, overwritten into ``out_g``."""
    x = _check_x(model, x)
    if out_g.shape != (model.nvar,):
        raise ValueError(f"gradient buffer has shape {out_g.shape}, expected ({model.nvar},)")
    out_g[:] = 0.0
    for tp in model.plan.obj_terms:
        v = _term_values(tp, x)
        try:
            adj = tp.tape.adjoints(v, tp.nrec)
        except EvalDomainError as err:
            raise err.located(tp.kind, tp.block_index) from None
        for s, grad in enumerate(tp.tape.slot_sums(adj, tp.nrec)):
            out_g += np.bincount(tp.cols[s], weights=grad, minlength=model.nvar)


def eval_constraints(model: "CompiledModel", x: np.ndarray, out_c: np.ndarray) -> None:
    """Row values including every augment, overwritten into ``out_c``."""
    x = _check_x(model, x)
    if model.ncon == 0:
        return
    if out_c.shape != (model.ncon,):
        raise ValueError(f"constraint buffer has shape {out_c.shape}, expected ({model.ncon},)")
    out_c[:] = 0.0
    for tp in model.plan.con_terms:
        v = _term_values(tp, x)
        root = _root_as_records(v[tp.tape.root], tp.nrec)
        if tp.row_offset is not None:
            out_c[tp.row_offset : tp.row_offset + tp.nrec] += root
        else:
            np.add.at(out_c, tp.rows, root)


def jacobian_structure(model: "CompiledModel") -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of every Jacobian slot; duplicates are intentional."""
    return model.plan.jac_rows.copy(), model.plan.jac_cols.copy()


def eval_jacobian(model: "CompiledModel", x: np.ndarray, out_vals: np.ndarray) -> None:
    """Partial for each Jacobian slot; duplicate coordinates are not summed."""
    x = _check_x(model, x)
    n = model.plan.n_jac_slots
    if out_vals.shape != (n,):
        raise ValueError(f"jacobian buffer has shape {out_vals.shape}, expected ({n},)")
    for tp in model.plan.con_terms:
        v = _term_values(tp, x)
        try:
            adj = tp.tape.adjoints(v, tp.nrec)
        except EvalDomainError as err:
            raise err.located(tp.kind, tp.block_index) from None
        for s, grad in enumerate(tp.tape.slot_sums(adj, tp.nrec)):
            lo, hi = tp.jac_slices[s]
            out_vals[lo:hi] = grad


def hessian_structure(model: "CompiledModel") -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of the Lagrangian Hessian lower triangle, per term.

    Each term contributes the full lower triangle over its local variable
    slots, so structurally zero pairs are included and the pattern never
    depends on the evaluation point.
    """
    return model.plan.hess_rows.copy(), model.plan.hess_cols.copy()


def eval_hessian(
    model: "CompiledModel",
    x: np.ndarray,
    mult: np.ndarray,
    obj_weight: float,
    out_vals: np.ndarray,
) -> None:
    """Slots of the Hessian of ``obj_weight * f + mult . g``."""
    x = _check_x(model, x)
    mult = np.asarray(mult, dtype=np.float64)
    if mult.shape != (model.ncon,):
        raise ValueError(f"multipliers have shape {mult.shape}, expected ({model.ncon},)")
    n = model.plan.n_hess_slots
    if out_vals.shape != (n,):
        raise ValueError(f"hessian buffer has shape {out_vals.shape}, expected ({n},)")
    for tp in model.plan.obj_terms + model.plan.con_terms:
        k = tp.tape.k
        if k == 0:
            continue
        if tp.kind == "objective":
            weight: float | np.ndarray = float(obj_weight)
        else:
            weight = mult[tp.rows]
        v = _term_values(tp, x)
        try:
            adj = tp.tape.adjoints(v, tp.nrec)
            cols_by_seed = []
            for seed in range(k):
                tan = tp.tape.tangents(v, seed)
                dot = tp.tape.adjoint_tangents(v, adj, tan)
                cols_by_seed.append(tp.tape.slot_sums(dot, tp.nrec))
        except EvalDomainError as err:
            raise err.located(tp.kind, tp.block_index) from None
        for pair in tp.hess_pairs:
            val = cols_by_seed[pair.j][pair.i]
            if pair.dup is not None:
                val = val * (1.0 + pair.dup)
            out_vals[pair.start : pair.start + tp.nrec] = weight * val


# ----------------------------------------------------------------------
# duplicate-coordinate compression
# ----------------------------------------------------------------------


@dataclass(eq=False)
class CompressedPattern:
    """Deduplicated COO pattern plus the raw-slot to compressed-slot map."""

    rows: np.ndarray
    cols: np.ndarray
    slot_map: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.rows.shape[0])

    def sum_values(self, raw_values: np.ndarray) -> np.ndarray:
        """Sum raw slot values into their compressed slots."""
        return np.bincount(self.slot_map, weights=raw_values, minlength=self.nnz)


def compress_coordinates(rows: np.ndarray, cols: np.ndarray) -> CompressedPattern:
    if rows.shape != cols.shape:
        raise ValueError("row/col arrays differ in length")
    if rows.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return CompressedPattern(empty, empty.copy(), np.zeros(0, dtype=np.int64))
    stacked = np.stack([rows, cols], axis=1)
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    return CompressedPattern(
        uniq[:, 0].astype(np.int64),
        uniq[:, 1].astype(np.int64),
        inverse.astype(np.int64).ravel(),
    )
