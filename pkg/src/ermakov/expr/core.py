"""The :class:`ExprAst` value type and the operations on it."""
from __future__ import annotations

import math
from functools import cached_property

from ..errors import DomainError, MissingBindingError, UndeclaredVariableError
from .dual import Dual, HyperDual
from .nodes import BinOp, Call, Const, Neg, Node, Var, free_vars, is_zero, substitute, to_source
from .parser import parse_node
from .program import compile_node

DEFAULT_QUAD_TOL = 1e-12


class ExprAst:
    """Immutable parsed expression over an ordered set of declared variables."""

    __slots__ = ("root", "declared_vars", "__dict__")

    def __init__(self, root: Node, declared_vars):
        declared = tuple(dict.fromkeys(declared_vars))
        for name in free_vars(root):
            if name not in declared:
                raise UndeclaredVariableError(name)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "declared_vars", declared)

    def __setattr__(self, key, value):
        raise AttributeError("ExprAst is immutable")

    def __repr__(self):
        return f"ExprAst({self.source!r}, {list(self.declared_vars)!r})"

    def __eq__(self, other):
        return (isinstance(other, ExprAst) and self.root == other.root
                and self.declared_vars == other.declared_vars)

    def __hash__(self):
        return hash((self.root, self.declared_vars))

    @cached_property
    def source(self) -> str:
        return to_source(self.root)

    @cached_property
    def free_vars(self) -> frozenset:
        return free_vars(self.root)

    @cached_property
    def program(self):
        return compile_node(self.root, self.declared_vars)

    @property
    def is_zero(self) -> bool:
        return is_zero(self.root)

    @property
    def is_constant(self) -> bool:
        return not self.free_vars

    def __call__(self, *values) -> float:
        """Evaluate with positional values in ``declared_vars`` order."""
        if len(values) != len(self.declared_vars):
            raise TypeError(f"expected {len(self.declared_vars)} values, got {len(values)}")
        return self.program.run(values)

    def env(self, bindings) -> list:
        env = []
        for name in self.declared_vars:
            if name in bindings:
                env.append(float(bindings[name]))
            elif name in self.free_vars:
                raise MissingBindingError(name)
            else:
                env.append(0.0)
        return env

    def substitute(self, mapping, declared_vars=None) -> "ExprAst":
        """Replace variables by numbers or other trees; drops substituted names."""
        if declared_vars is None:
            declared_vars = [v for v in self.declared_vars if v not in mapping]
        trees = {k: (v.root if isinstance(v, ExprAst) else v) for k, v in mapping.items()}
        return ExprAst(substitute(self.root, trees), declared_vars)

    def with_vars(self, declared_vars) -> "ExprAst":
        return ExprAst(self.root, declared_vars)


def parse(source: str, declared_vars) -> ExprAst:
    """Parse DSL text; raises ``ExprSyntaxError`` or ``UndeclaredVariableError``."""
    return ExprAst(parse_node(source, declared_vars), declared_vars)


def constant(value: float, declared_vars=()) -> ExprAst:
    return ExprAst(Const(float(value)), declared_vars)


def evaluate(ast: ExprAst, bindings) -> float:
    return ast.program.run(ast.env(bindings))


def _apply_float(name, a):
    if name == "ln":
        if a <= 0.0:
            raise DomainError(f"ln of non-positive value {a!r}")
        return math.log(a)
    if name == "sqrt":
        if a < 0.0:
            raise DomainError(f"sqrt of negative value {a!r}")
        return math.sqrt(a)
    if name == "exp":
        try:
            return math.exp(a)
        except OverflowError:
            raise DomainError(f"exp overflow at {a!r}") from None
    return {"sin": math.sin, "cos": math.cos, "abs": abs, "tanh": math.tanh}[name](a)


def _float_pow(a, b):
    if a == 0.0 and b < 0.0:
        raise DomainError("division by zero")
    if a < 0.0 and b != math.floor(b):
        raise DomainError("power outside its real domain")
    try:
        return math.pow(a, b)
    except OverflowError:
        raise DomainError("non-finite intermediate result") from None


def eval_tree(node: Node, env: dict):
    """Tree-walking evaluator; works on floats, :class:`Dual` and :class:`HyperDual`."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise MissingBindingError(node.name) from None
    if isinstance(node, Neg):
        return -eval_tree(node.operand, env)
    if isinstance(node, Call):
        a = eval_tree(node.arg, env)
        if isinstance(a, (Dual, HyperDual)):
            return a.apply(node.func)
        return _apply_float(node.func, a)
    a = eval_tree(node.left, env)
    b = eval_tree(node.right, env)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if not isinstance(b, (Dual, HyperDual)) and b == 0.0:
            raise DomainError("division by zero")
        return a / b
    if isinstance(a, (Dual, HyperDual)) or isinstance(b, (Dual, HyperDual)):
        return a ** b
    return _float_pow(a, b)


def derivative(ast: ExprAst, var: str, bindings, order: int = 1) -> float:
    """Exact first or second derivative by forward-mode AD."""
    if var not in ast.declared_vars:
        raise UndeclaredVariableError(var)
    env = {}
    for name in ast.declared_vars:
        if name in bindings:
            env[name] = float(bindings[name])
        elif name in ast.free_vars:
            raise MissingBindingError(name)
    x = env.get(var, 0.0)
    if order == 1:
        env[var] = Dual(x, 1.0)
        out = eval_tree(ast.root, env)
        return out.eps if isinstance(out, Dual) else 0.0
    if order == 2:
        env[var] = HyperDual(x, 1.0, 1.0, 0.0)
        out = eval_tree(ast.root, env)
        return out.d if isinstance(out, HyperDual) else 0.0
    raise ValueError("order must be 1 or 2")


def jet(ast: ExprAst, var: str, value: float, fixed=None):
    """Return ``(f, f', f'')`` at ``value`` in a single hyper-dual pass."""
    env = dict(fixed or {})
    env[var] = HyperDual(value, 1.0, 1.0, 0.0)
    out = eval_tree(ast.root, env)
    if isinstance(out, HyperDual):
        return out.a, out.b, out.d
    return float(out), 0.0, 0.0


def integral(ast: ExprAst, var: str, lower: float, upper, fixed=None, tol: float = DEFAULT_QUAD_TOL):
    """Definite integral of ``ast`` in ``var`` by adaptive Gauss-Kronrod quadrature.

    ``upper`` may be a :class:`Dual`; the result then carries the derivative
    with respect to the upper limit (the integrand at ``upper``).
    """
    if var not in ast.declared_vars:
        raise UndeclaredVariableError(var)
    bindings = dict(fixed or {})
    bindings[var] = float(lower)
    env = ast.env(bindings)
    slot = ast.declared_vars.index(var)
    if isinstance(upper, Dual):
        value, _, _ = ast.program.integrate(slot, env, lower, upper.re, tol)
        env[slot] = upper.re
        return Dual(value, ast.program.run(env) * upper.eps)
    value, _, _ = ast.program.integrate(slot, env, lower, upper, tol)
    return value
