"""Forward-mode automatic differentiation.

``Dual`` carries a value and one directional derivative. ``HyperDual`` carries
``a + b*e1 + c*e2 + d*e1*e2`` with ``e1**2 == e2**2 == 0``; seeding ``b = c = 1``
yields the exact second derivative in ``d``.
"""
from __future__ import annotations

import math

from ..errors import DomainError


def _check_unary(name, a):
    if name == "ln" and a <= 0.0:
        raise DomainError(f"ln of non-positive value {a!r}")
    if name == "sqrt" and a <= 0.0:
        # sqrt(0) has no finite derivative
        raise DomainError(f"sqrt not differentiable at {a!r}")
    if name == "abs" and a == 0.0:
        raise DomainError("abs not differentiable at 0")


def _sech2(a):
    c = math.cosh(a)
    return 1.0 / (c * c) if c < 1e150 else 0.0


def _finite(x):
    if not math.isfinite(x):
        raise DomainError("non-finite intermediate result")
    return x


def _exp(a):
    try:
        return math.exp(a)
    except OverflowError:
        raise DomainError(f"exp overflow at {a!r}") from None


# name -> (f, f', f'')
UNARY_JETS = {
    "sin": (math.sin, math.cos, lambda a: -math.sin(a)),
    "cos": (math.cos, lambda a: -math.sin(a), lambda a: -math.cos(a)),
    "exp": (_exp, _exp, _exp),
    "ln": (math.log, lambda a: 1.0 / a, lambda a: -1.0 / (a * a)),
    "sqrt": (math.sqrt, lambda a: 0.5 / math.sqrt(a), lambda a: -0.25 / (a * math.sqrt(a))),
    "abs": (abs, lambda a: math.copysign(1.0, a), lambda a: 0.0),
    "tanh": (math.tanh, _sech2, lambda a: -2.0 * math.tanh(a) * _sech2(a)),
}


class Dual:
    __slots__ = ("re", "eps")

    def __init__(self, re, eps=0.0):
        self.re = float(re)
        self.eps = float(eps)

    def __repr__(self):
        return f"Dual({self.re!r}, {self.eps!r})"

    @staticmethod
    def _lift(other):
        return other if isinstance(other, Dual) else Dual(other)

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.re + o.re, self.eps + o.eps)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return Dual(self.re - o.re, self.eps - o.eps)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Dual(-self.re, -self.eps)

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(self.re * o.re, self.re * o.eps + self.eps * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.re == 0.0:
            raise DomainError("division by zero")
        inv = 1.0 / o.re
        return Dual(self.re * inv, (self.eps - self.re * inv * o.eps) * inv)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, other):
        if isinstance(other, Dual):
            if self.re <= 0.0:
                raise DomainError("variable exponent requires a positive base")
            return (other * self.apply("ln")).apply("exp")
        n = float(other)
        if self.re == 0.0 and n < 2.0 and n != 0.0 and n != 1.0:
            raise DomainError(f"0 ** {n!r} is not differentiable")
        if self.re < 0.0 and not n.is_integer():
            raise DomainError("negative base with non-integer exponent")
        if n == 0.0:
            return Dual(1.0, 0.0)
        return Dual(_finite(self.re ** n), _finite(n * self.re ** (n - 1.0)) * self.eps)

    def __rpow__(self, other):
        base = float(other)
        if base <= 0.0:
            raise DomainError("variable exponent requires a positive base")
        return (self * math.log(base)).apply("exp")

    def apply(self, name):
        _check_unary(name, self.re)
        f, df, _ = UNARY_JETS[name]
        return Dual(_finite(f(self.re)), _finite(df(self.re)) * self.eps)


class HyperDual:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b=0.0, c=0.0, d=0.0):
        self.a = float(a)
        self.b = float(b)
        self.c = float(c)
        self.d = float(d)

    def __repr__(self):
        return f"HyperDual({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    @staticmethod
    def _lift(other):
        return other if isinstance(other, HyperDual) else HyperDual(other)

    def _chain(self, f0, f1, f2):
        return HyperDual(f0, f1 * self.b, f1 * self.c, f1 * self.d + f2 * self.b * self.c)

    def __add__(self, other):
        o = self._lift(other)
        return HyperDual(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return HyperDual(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return HyperDual(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        o = self._lift(other)
        return HyperDual(
            self.a * o.a,
            self.a * o.b + self.b * o.a,
            self.a * o.c + self.c * o.a,
            self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
        )

    __rmul__ = __mul__

    def _reciprocal(self):
        if self.a == 0.0:
            raise DomainError("division by zero")
        inv = 1.0 / self.a
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        return self * self._lift(other)._reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self._reciprocal()

    def __pow__(self, other):
        if isinstance(other, HyperDual):
            if self.a <= 0.0:
                raise DomainError("variable exponent requires a positive base")
            return (other * self.apply("ln")).apply("exp")
        n = float(other)
        if self.a == 0.0 and n < 2.0 and n != 0.0 and n != 1.0:
            raise DomainError(f"0 ** {n!r} is not differentiable")
        if self.a < 0.0 and not n.is_integer():
            raise DomainError("negative base with non-integer exponent")
        if n == 0.0:
            return HyperDual(1.0)
        a = self.a
        f0 = _finite(a ** n)
        f1 = _finite(n * a ** (n - 1.0))
        f2 = _finite(n * (n - 1.0) * a ** (n - 2.0)) if n != 1.0 else 0.0
        return self._chain(f0, f1, f2)

    def __rpow__(self, other):
        base = float(other)
        if base <= 0.0:
            raise DomainError("variable exponent requires a positive base")
        return (self * math.log(base)).apply("exp")

    def apply(self, name):
        _check_unary(name, self.a)
        f, df, d2f = UNARY_JETS[name]
        return self._chain(_finite(f(self.a)), _finite(df(self.a)), _finite(d2f(self.a)))
