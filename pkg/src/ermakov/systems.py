"""The three representations of an Ermakov system and conversions between them.

* :class:`GeneralizedErmakov` -- ``x'' + W2 x = F(y/x)/(y x^2)``, ``y'' + W2 y = 0``
  with a frequency ``W2`` that may depend on ``(t, x, y, x', y')``.
* :class:`SymmetricFrequency` -- the frequency family left invariant by the
  one-parameter group built on an auxiliary function ``rho(t)``.
* :class:`RayReidSpec` -- the nonlinearly coupled oscillator pair driven by
  ``w^2(t)`` and a coupling ``G(xy/rho^2)``, with ``rho`` solving Pinney's equation.

Frequency objects are callables ``W2(t, x, y, xdot, ydot)``; time functions
expose ``value(t)`` and, where needed, ``derivs(t) -> (f, f', f'')``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, SingularConfigurationError
from .expr import BinOp, Call, Const, ExprAst, Neg, Var, constant, jet, parse
from .ode import State

TIME_VARS = ("t",)
OMEGA2_VARS = ("t", "x", "y", "xdot", "ydot")
SIGMA_VARS = ("a1", "a2", "b1", "b2")
F_VARS = ("r",)
g_VARS = ("rinv",)
G_VARS = ("tau",)

TINY = 1e-300


def _require_vars(ast: ExprAst, allowed, what):
    extra = ast.free_vars - set(allowed)
    if extra:
        raise ConfigError(f"{what} may only depend on {sorted(allowed)}; got {sorted(extra)}")
    if ast.declared_vars != tuple(allowed):
        ast = ast.with_vars(allowed)
    return ast


class TimeFunction:
    """A closed-form function of time; derivatives come from hyper-dual AD."""

    def __init__(self, ast: ExprAst):
        self.ast = _require_vars(ast, TIME_VARS, "time function")

    @classmethod
    def parse(cls, source):
        return cls(parse(source, TIME_VARS))

    @classmethod
    def constant(cls, value):
        return cls(constant(value, TIME_VARS))

    def __repr__(self):
        return f"{type(self).__name__}({self.ast.source!r})"

    def value(self, t):
        return self.ast(t)

    def derivs(self, t):
        if self.ast.is_constant:
            return self.ast(t), 0.0, 0.0
        return jet(self.ast, "t", float(t))

    def squared(self) -> "TimeFunction":
        return TimeFunction(ExprAst(BinOp("^", self.ast.root, Const(2.0)), TIME_VARS))


class RhoSpec(TimeFunction):
    """Closed-form auxiliary function ``rho(t) > 0``."""

    def __init__(self, ast: ExprAst, window=None):
        super().__init__(ast)
        self.window = window
        self._inv_sq = ExprAst(BinOp("/", Const(1.0), BinOp("^", self.ast.root, Const(2.0))), TIME_VARS)
        if window is not None:
            self.check_positive(np.linspace(window[0], window[1], 33))

    def rho(self, t):
        return self.ast(t)

    def rhodot(self, t):
        return self.derivs(t)[1]

    def rhoddot(self, t):
        return self.derivs(t)[2]

    def check_positive(self, ts):
        for t in ts:
            r = self.ast(float(t))
            if not r > 0.0:
                raise DomainError(f"rho must be positive; rho({float(t)!r}) = {r!r}")

    def inverse_square_integral(self, t0, t1, tol):
        """``integral_{t0}^{t1} rho^-2 dt`` by adaptive quadrature."""
        if t0 == t1:
            return 0.0
        self.check_positive(np.linspace(t0, t1, 17))
        value, _, _ = self._inv_sq.program.integrate(0, [t0], t0, t1, tol)
        return value


class ExprOmega2:
    """Frequency squared given directly as an expression of ``(t, x, y, xdot, ydot)``."""

    def __init__(self, ast: ExprAst):
        self.ast = _require_vars(ast, OMEGA2_VARS, "Omega2")

    def __repr__(self):
        return f"ExprOmega2({self.ast.source!r})"

    @property
    def time_only(self):
        return self.ast.free_vars <= {"t"}

    def __call__(self, t, x, y, xdot, ydot):
        return self.ast(t, x, y, xdot, ydot)


class TraditionalOmega2:
    """``w^2(t) - g(x/y) / (x y^3)``."""

    time_only = False

    def __init__(self, omega2, g: ExprAst):
        self.omega2 = omega2
        self.g = _require_vars(g, g_VARS, "g")

    def __call__(self, t, x, y, xdot, ydot):
        w2 = self.omega2.value(t)
        if self.g.is_zero:
            return w2
        if abs(x) < TINY or abs(y) < TINY:
            raise SingularConfigurationError(f"g-term singular at x={x!r}, y={y!r}")
        return w2 - self.g(x / y) / (x * y ** 3)


class SymmetricOmega2:
    """``-rho''/rho + sigma(x/rho, y/rho, rho x' - rho' x, rho y' - rho' y) / rho^4``."""

    time_only = False

    def __init__(self, rho, sigma: ExprAst):
        self.rho = rho
        self.sigma = sigma

    def group_arguments(self, t, x, y, xdot, ydot):
        r, rd, _ = self.rho.derivs(t)
        return x / r, y / r, r * xdot - rd * x, r * ydot - rd * y

    def __call__(self, t, x, y, xdot, ydot):
        r, rd, rdd = self.rho.derivs(t)
        if not r > 0.0:
            raise DomainError(f"rho must be positive; rho({t!r}) = {r!r}")
        s = self.sigma(x / r, y / r, r * xdot - rd * x, r * ydot - rd * y)
        return -rdd / r + s / r ** 4


class RayReidOmega2:
    """``w^2(t) - G(xy/rho^2) / rho^4``."""

    time_only = False

    def __init__(self, omega2, rho, G: ExprAst):
        self.omega2 = omega2
        self.rho = rho
        self.G = G

    def __call__(self, t, x, y, xdot, ydot):
        r = self.rho.derivs(t)[0]
        r2 = r * r
        return self.omega2.value(t) - self.G(x * y / r2) / (r2 * r2)


class Omega2FromRho:
    """Time-only ``w^2 = W0^2/rho^4 - rho''/rho`` built from a given ``rho``."""

    def __init__(self, rho, Omega0=1.0):
        self.rho = rho
        self.Omega0 = float(Omega0)

    def __repr__(self):
        return f"Omega2FromRho({self.rho!r}, Omega0={self.Omega0!r})"

    def value(self, t):
        r, _, rdd = self.rho.derivs(t)
        if not r > 0.0:
            raise DomainError(f"rho must be positive; rho({t!r}) = {r!r}")
        return self.Omega0 ** 2 / r ** 4 - rdd / r


@dataclass(frozen=True)
class GeneralizedErmakov:
    F: ExprAst
    Omega2: object
    name: str = "generalized"

    def __post_init__(self):
        object.__setattr__(self, "F", _require_vars(self.F, F_VARS, "F"))
        if isinstance(self.Omega2, ExprAst):
            object.__setattr__(self, "Omega2", ExprOmega2(self.Omega2))


@dataclass(frozen=True)
class SymmetricFrequency:
    rho: object
    sigma: ExprAst

    def __post_init__(self):
        object.__setattr__(self, "sigma", _require_vars(self.sigma, SIGMA_VARS, "sigma"))


class RayReidSpec:
    """Coupled oscillator ``x'' + w^2 x = x rho^-4 G(xy/rho^2)`` (same for ``y``).

    ``rho`` must solve Pinney's equation for ``omega2``; this is checked at
    ``n_check`` points of ``window`` to within ``tol``.
    """

    def __init__(self, omega2, G: ExprAst, rho, window=None, tol=1e-8, n_check=41):
        self.omega2 = omega2
        self.G = _require_vars(G, G_VARS, "G")
        self.rho = rho
        if window is None:
            window = getattr(rho, "window", None) or (0.0, 1.0)
        self.window = (float(window[0]), float(window[1]))
        ts = np.linspace(self.window[0], self.window[1], n_check)
        res = pinney_residuals(rho, omega2, ts)
        worst = float(np.max(np.abs(res)))
        if worst > tol:
            raise ConfigError(f"rho does not solve Pinney's equation for omega2 (max residual {worst:.3g})")
        self.pinney_residual = worst

    def coupling(self, t, x, y):
        r = self.rho.derivs(t)[0]
        r2 = r * r
        return self.G(x * y / r2) / (r2 * r2)


def pinney_residuals(rho, omega2, ts):
    """``rho'' + w^2 rho - rho^-3`` at the given times."""
    out = []
    for t in ts:
        r, _, rdd = rho.derivs(float(t))
        out.append(rdd + omega2.value(float(t)) * r - r ** -3)
    return np.array(out)


# --- operations ----------------------------------------------------------------


def rhs_generalized(sys: GeneralizedErmakov, s: State):
    """Accelerations ``(x'', y'')`` of the generalized system at ``s``."""
    t, x, y, xd, yd = s.t, s.x, s.y, s.xdot, s.ydot
    w2 = sys.Omega2(t, x, y, xd, yd)
    if sys.F.is_zero:
        return -w2 * x, -w2 * y
    if abs(x) < TINY or abs(y) < TINY:
        raise SingularConfigurationError(f"F-term 1/(y x^2) singular at x={x!r}, y={y!r}, t={t!r}")
    return -w2 * x + sys.F(y / x) / (y * x * x), -w2 * y


def omega2_traditional(omega, g: ExprAst) -> TraditionalOmega2:
    """Frequency of the three-function form: ``w(t)^2 - g(x/y)/(x y^3)``.

    ``omega`` is an expression of ``t`` for ``w`` itself, or any time function
    whose ``value`` already returns ``w^2``.
    """
    if isinstance(omega, ExprAst):
        omega = TimeFunction(omega).squared()
    return TraditionalOmega2(omega, g)


def omega2_symmetric(sf: SymmetricFrequency) -> SymmetricOmega2:
    return SymmetricOmega2(sf.rho, sf.sigma)


def F_from_fg(f: ExprAst, g: ExprAst) -> ExprAst:
    """Combine the two traditional coupling functions into ``F(r)``, ``r = y/x``.

    ``F(r) = f(r) - g(1/r) / r^2``; the minus sign is what makes the generalized
    pair reproduce ``x'' + w^2 x = f/(y x^2)``, ``y'' + w^2 y = g/(x y^2)``.
    """
    f = _require_vars(f, F_VARS, "f")
    g = _require_vars(g, g_VARS, "g")
    if g.is_zero:
        return f
    r = Var("r")
    g_of_inv = g.substitute({"rinv": ExprAst(BinOp("/", Const(1.0), r), F_VARS)}, F_VARS)
    term = BinOp("/", g_of_inv.root, BinOp("^", r, Const(2.0)))
    if f.is_zero:
        return ExprAst(Neg(term), F_VARS)
    return ExprAst(BinOp("-", f.root, term), F_VARS)


def omega_from_rho(rho, Omega0=1.0) -> Omega2FromRho:
    return Omega2FromRho(rho, Omega0)


def rayreid_omega2(spec: RayReidSpec) -> RayReidOmega2:
    return RayReidOmega2(spec.omega2, spec.rho, spec.G)


def rayreid_system(spec: RayReidSpec) -> GeneralizedErmakov:
    """The Ray-Reid pair viewed as a generalized system with ``F = 0``."""
    return GeneralizedErmakov(constant(0.0, F_VARS), rayreid_omega2(spec), name="rayreid")


def traditional_system(omega, f: ExprAst, g: ExprAst) -> GeneralizedErmakov:
    return GeneralizedErmakov(F_from_fg(f, g), omega2_traditional(omega, g), name="traditional")


def symmetric_system(sf: SymmetricFrequency, F: ExprAst) -> GeneralizedErmakov:
    return GeneralizedErmakov(F, omega2_symmetric(sf), name="symmetric")


def rhs_rayreid(spec: RayReidSpec, s: State):
    """Accelerations written directly in the coupled-oscillator form."""
    w2 = spec.omega2.value(s.t)
    c = spec.coupling(s.t, s.x, s.y)
    return -w2 * s.x + s.x * c, -w2 * s.y + s.y * c


def rhs_traditional(omega2, f: ExprAst, g: ExprAst, s: State):
    """``x'' = -w^2 x + f(y/x)/(y x^2)``, ``y'' = -w^2 y + g(x/y)/(x y^2)``."""
    x, y = s.x, s.y
    w2 = omega2.value(s.t)
    return -w2 * x + f(y / x) / (y * x * x), -w2 * y + g(x / y) / (x * y * y)


def equivalent_residual(F: ExprAst, s: State, xddot, yddot):
    """``x y'' - y x'' + F(y/x)/x^2``; vanishes on solutions whatever the frequency."""
    if abs(s.x) < TINY:
        raise SingularConfigurationError(f"residual singular at x={s.x!r}")
    return s.x * yddot - s.y * xddot + F(s.y / s.x) / (s.x * s.x)


def sigma_star(Omega2, rho, s: State):
    """``rho^4 (W2 + rho''/rho)``; equals ``sigma`` for admissible frequencies."""
    r, _, rdd = rho.derivs(s.t)
    return r ** 4 * (Omega2(s.t, s.x, s.y, s.xdot, s.ydot) + rdd / r)


def ensure_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"non-finite value {v!r}")
