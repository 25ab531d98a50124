"""Expression tree for time-series analytics.

Arithmetic nodes produce scalars; time-series nodes (``Ref``, ``Const``,
``Shift``, ``TBin``) produce series and only appear under ``Sum`` or
``Count``.
"""
from __future__ import annotations

from dataclasses import dataclass


class Node:
    __slots__ = ()


# time-series expressions


@dataclass(frozen=True)
class Ref(Node):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const(Node):
    value: float
    a: int
    b: int

    def __str__(self):
        return f"Constant({self.value!r},{self.a},{self.b})"


@dataclass(frozen=True)
class Shift(Node):
    arg: Node
    k: int

    def __str__(self):
        return f"Shift({self.arg},{self.k})"


@dataclass(frozen=True)
class TBin(Node):
    op: str  # '+', '-', '*'
    left: Node
    right: Node

    def __str__(self):
        return f"({self.left}{self.op}{self.right})"


# arithmetic expressions


@dataclass(frozen=True)
class Num(Node):
    value: float

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def __str__(self):
        return f"-({self.arg})"


@dataclass(frozen=True)
class Bin(Node):
    op: str  # '+', '-', '*', '/'
    left: Node
    right: Node

    def __str__(self):
        return f"({self.left}{self.op}{self.right})"


@dataclass(frozen=True)
class Sqrt(Node):
    arg: Node

    def __str__(self):
        return f"sqrt({self.arg})"


@dataclass(frozen=True)
class Sum(Node):
    """Sum of a series over its domain, optionally clipped to ``[a, b]``
    and to the domain of ``over``."""

    arg: Node
    a: int | None = None
    b: int | None = None
    over: Node | None = None

    def __str__(self):
        extra = f",{self.a},{self.b}" if self.a is not None else ""
        return f"Sum({self.arg}{extra})"


@dataclass(frozen=True)
class Count(Node):
    """Number of positions in the domain of a series expression."""

    arg: Node

    def __str__(self):
        return f"Count({self.arg})"


@dataclass(frozen=True)
class Stat(Node):
    """A statistic kept for display; ``body`` is its arithmetic expansion."""

    kind: str
    args: tuple
    lag: int | None
    body: Node

    def __str__(self):
        parts = [str(a) for a in self.args]
        if self.lag is not None:
            parts.append(str(self.lag))
        return f"{self.kind}({','.join(parts)})"


def walk(node):
    """Yield every node of the tree, parents first."""
    yield node
    for child in children(node):
        yield from walk(child)


def children(node):
    if isinstance(node, (Shift, Neg, Sqrt, Count)):
        return (node.arg,)
    if isinstance(node, (TBin, Bin)):
        return (node.left, node.right)
    if isinstance(node, Sum):
        return (node.arg,) if node.over is None else (node.arg, node.over)
    if isinstance(node, Stat):
        return (node.body,)
    return ()


def refs(node) -> set[str]:
    return {n.name for n in walk(node) if isinstance(n, Ref)}
