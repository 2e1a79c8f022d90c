"""Compilation of expression trees to postfix programs for the kernels."""
from __future__ import annotations

import numpy as np

from .. import _kernels_py as K
from .. import kernels
from .nodes import BinOp, Call, Const, Neg, Var

_BINARY = {"+": K.OP_ADD, "-": K.OP_SUB, "*": K.OP_MUL, "/": K.OP_DIV, "^": K.OP_POW}
_UNARY = {
    "sin": K.OP_SIN,
    "cos": K.OP_COS,
    "exp": K.OP_EXP,
    "ln": K.OP_LN,
    "sqrt": K.OP_SQRT,
    "abs": K.OP_ABS,
    "tanh": K.OP_TANH,
}


class Program:
    """A compiled expression; ``env`` slots follow ``var_names``."""

    __slots__ = ("var_names", "ops", "args", "consts", "_ops_a", "_args_a", "_consts_a", "_compiled")

    def __init__(self, var_names, ops, args, consts):
        self.var_names = tuple(var_names)
        self.ops = tuple(ops)
        self.args = tuple(args)
        self.consts = tuple(consts)
        self._ops_a = np.asarray(ops, dtype=np.intc)
        self._args_a = np.asarray(args, dtype=np.intc)
        self._consts_a = np.asarray(consts, dtype=np.float64)
        self._compiled = kernels.BACKEND != "python"

    def __call__(self, *values):
        return self.run(values)

    def run(self, env):
        if self._compiled:
            return kernels.eval_program(self._ops_a, self._args_a, self._consts_a,
                                        np.asarray(env, dtype=np.float64))
        return K.eval_program(self.ops, self.args, self.consts, env)

    def integrate(self, slot, env, a, b, tol, limit=K.DEFAULT_LIMIT):
        if self._compiled:
            return kernels.integrate_program(self._ops_a, self._args_a, self._consts_a,
                                             np.asarray(env, dtype=np.float64), slot,
                                             float(a), float(b), float(tol), limit)
        return K.integrate_program(self.ops, self.args, self.consts, list(env), slot,
                                   float(a), float(b), float(tol), limit)


def compile_node(node, var_names) -> Program:
    slots = {name: k for k, name in enumerate(var_names)}
    ops, args, consts = [], [], []

    def emit(n):
        if isinstance(n, Const):
            ops.append(K.OP_CONST)
            args.append(len(consts))
            consts.append(float(n.value))
        elif isinstance(n, Var):
            ops.append(K.OP_VAR)
            args.append(slots[n.name])
        elif isinstance(n, Neg):
            emit(n.operand)
            ops.append(K.OP_NEG)
            args.append(0)
        elif isinstance(n, Call):
            emit(n.arg)
            ops.append(_UNARY[n.func])
            args.append(0)
        elif isinstance(n, BinOp):
            emit(n.left)
            emit(n.right)
            ops.append(_BINARY[n.op])
            args.append(0)
        else:
            raise TypeError(f"not an expression node: {n!r}")

    emit(node)
    return Program(var_names, ops, args, consts)
