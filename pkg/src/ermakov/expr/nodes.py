"""Expression tree nodes and the source printer."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "abs", "tanh")
BINARY_OPS = ("+", "-", "*", "/", "^")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Call]

# binding strength used by the printer; mirrors the parser's grammar
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Const) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _PREC["neg"]
    return _PREC["atom"]


def to_source(node: Node) -> str:
    """Render ``node`` as DSL text that parses back to an equivalent tree."""
    if isinstance(node, Const):
        if not math.isfinite(node.value):
            raise ValueError(f"cannot print non-finite constant {node.value!r}")
        text = repr(float(node.value))
        return text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left = to_source(node.left)
    right = to_source(node.right)
    if node.op == "^":
        # right-associative; a negated base must be parenthesised
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    return f"{left} {node.op} {right}"


def free_vars(node: Node) -> frozenset:
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, (Neg,)):
        return free_vars(node.operand)
    if isinstance(node, Call):
        return free_vars(node.arg)
    return free_vars(node.left) | free_vars(node.right)


def substitute(node: Node, mapping: dict) -> Node:
    """Replace variables by nodes (or numbers) from ``mapping``."""
    if isinstance(node, Var):
        if node.name in mapping:
            repl = mapping[node.name]
            return Const(float(repl)) if isinstance(repl, (int, float)) else repl
        return node
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, mapping))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, mapping))
    return BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))


def is_zero(node: Node) -> bool:
    return isinstance(node, Const) and node.value == 0.0
