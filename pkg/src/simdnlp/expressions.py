"""Scalar expression kernels.

A kernel is a small expression tree over the fields of one data record and
indexed variable references.  The same tree is evaluated for every record of
a table, which is what makes model evaluation and differentiation
data-parallel: one tree, many records.

Node kinds:

* ``Const``   -- a real constant baked into the tree
* ``Field``   -- a real column of the bound data table
* ``Var``     -- a variable-block reference indexed by an integer column
* ``Unary``   -- neg, sin, cos, exp, log, sqrt
* ``Binary``  -- add, sub, mul, div, pow

``pow`` with an integral constant exponent is detected and evaluated on the
fast integer path (no positivity requirement on the base).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Union

if TYPE_CHECKING:
    from .core import VariableBlock

UNARY_OPS = frozenset({"neg", "sin", "cos", "exp", "log", "sqrt"})
BINARY_OPS = frozenset({"add", "sub", "mul", "div", "pow"})

Operand = Union["Expr", float, int]


class Expr:
    """Base node; arithmetic operators build larger trees."""

    __slots__ = ()

    def __add__(self, other: Operand) -> "Expr":
        return Binary("add", self, as_expr(other))

    def __radd__(self, other: Operand) -> "Expr":
        return Binary("add", as_expr(other), self)

    def __sub__(self, other: Operand) -> "Expr":
        return Binary("sub", self, as_expr(other))

    def __rsub__(self, other: Operand) -> "Expr":
        return Binary("sub", as_expr(other), self)

    def __mul__(self, other: Operand) -> "Expr":
        return Binary("mul", self, as_expr(other))

    def __rmul__(self, other: Operand) -> "Expr":
        return Binary("mul", as_expr(other), self)

    def __truediv__(self, other: Operand) -> "Expr":
        return Binary("div", self, as_expr(other))

    def __rtruediv__(self, other: Operand) -> "Expr":
        return Binary("div", as_expr(other), self)

    def __pow__(self, other: Operand) -> "Expr":
        return Binary("pow", self, as_expr(other))

    def __rpow__(self, other: Operand) -> "Expr":
        return Binary("pow", as_expr(other), self)

    def __neg__(self) -> "Expr":
        return Unary("neg", self)

    def __pos__(self) -> "Expr":
        return self


# eq=False keeps identity hashing so shared subtrees are taped exactly once.
@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, eq=False)
class Field(Expr):
    """Reference to a real column of the bound table."""

    name: str


@dataclass(frozen=True, eq=False)
class Var(Expr):
    """Reference to one entry of a variable block.

    ``index`` names an integer column of the bound table holding the flat
    0-based position of the entry within the block.
    """

    block: "VariableBlock"
    index: str


@dataclass(frozen=True, eq=False)
class Unary(Expr):
    op: str
    child: Expr

    def __post_init__(self) -> None:
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary op {self.op!r}")


@dataclass(frozen=True, eq=False)
class Binary(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self) -> None:
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary op {self.op!r}")


def as_expr(value: Operand) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)):
        return Const(float(value))
    raise TypeError(f"cannot use {type(value).__name__} in a kernel expression")


def field(name: str) -> Field:
    """A real data column of the table the kernel is bound to."""
    return Field(name)


def sin(e: Operand) -> Expr:
    return Unary("sin", as_expr(e))


def cos(e: Operand) -> Expr:
    return Unary("cos", as_expr(e))


def exp(e: Operand) -> Expr:
    return Unary("exp", as_expr(e))


def log(e: Operand) -> Expr:
    return Unary("log", as_expr(e))


def sqrt(e: Operand) -> Expr:
    return Unary("sqrt", as_expr(e))


def walk(root: Expr) -> Iterator[Expr]:
    """Yield every node reachable from ``root``, children before parents.

    Shared subtrees are yielded once.  Iterative so deep trees cannot blow
    the recursion limit.
    """
    seen: set[int] = set()
    stack: list[tuple[Expr, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
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


def real_fields(root: Expr) -> set[str]:
    return {n.name for n in walk(root) if isinstance(n, Field)}


def var_slots(root: Expr) -> list[tuple["VariableBlock", str]]:
    """Distinct (block, index-column) references in first-appearance order."""
    out: list[tuple["VariableBlock", str]] = []
    seen: set[tuple[int, str]] = set()
    for n in walk(root):
        if isinstance(n, Var):
            key = (id(n.block), n.index)
            if key not in seen:
                seen.add(key)
                out.append((n.block, n.index))
    return out
