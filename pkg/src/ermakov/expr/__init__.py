"""Expression DSL: parsing, evaluation, automatic differentiation and quadrature."""
from .core import (
    DEFAULT_QUAD_TOL,
    ExprAst,
    constant,
    derivative,
    eval_tree,
    evaluate,
    integral,
    jet,
    parse,
)
from .dual import Dual, HyperDual
from .nodes import FUNCTIONS, BinOp, Call, Const, Neg, Var, to_source

__all__ = [
    "DEFAULT_QUAD_TOL",
    "ExprAst",
    "constant",
    "derivative",
    "eval_tree",
    "evaluate",
    "integral",
    "jet",
    "parse",
    "Dual",
    "HyperDual",
    "FUNCTIONS",
    "BinOp",
    "Call",
    "Const",
    "Neg",
    "Var",
    "to_source",
]
