"""Solution of the Ray-Reid pair by quadratures.

In group coordinates ``u = x/rho``, ``v = y/rho``, ``T = integral rho^-2 dt``
the pair becomes autonomous, ``u'' + u = u G(uv)`` (same for ``v``). With
``q = uv`` and ``s = v/u`` the two first integrals give

    q'^2 = P(q) = 2I + 4q (J - q + Phi(q)),   Phi(q) = integral_{q_ref}^{q} G
    q s'/s = L,                                L = x y' - y x' = u v' - v u'

so ``q`` follows from a one-dimensional problem and ``s`` from one more
quadrature. ``x`` and ``y`` are then recovered algebraically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .errors import ConfigError, NumericalError, SingularConfigurationError
from .expr import ExprAst, integral
from .numdiff import differentiate
from .ode import IntegratorConfig, State, Trajectory, solve_ivp
from .symmetry import invert_time_map, time_map_T
from .systems import G_VARS, RayReidSpec, _require_vars

DEFAULT_CONFIG = IntegratorConfig(rtol=1e-12, atol=1e-14, h_max=0.05)
QUAD_TOL = 1e-13


@dataclass(frozen=True)
class ReducedState:
    T: float
    u: float
    v: float
    uprime: float
    vprime: float

    def __post_init__(self):
        if self.u == 0.0:
            raise SingularConfigurationError("u = x/rho must be non-zero")

    @property
    def q(self):
        return self.u * self.v

    @property
    def s(self):
        return self.v / self.u

    @property
    def qprime(self):
        return self.uprime * self.v + self.u * self.vprime

    @property
    def sprime(self):
        return (self.vprime * self.u - self.v * self.uprime) / (self.u * self.u)

    @property
    def L(self):
        return self.u * self.vprime - self.v * self.uprime


def to_group_coords(s: State, rho, t0=0.0) -> ReducedState:
    """``(T, u, v, u', v')`` with ``u' = du/dT = rho x' - rho' x``."""
    r, rd = rho.derivs(s.t)[:2]
    T = time_map_T(rho, t0, s.t)
    return ReducedState(T, s.x / r, s.y / r, r * s.xdot - rd * s.x, r * s.ydot - rd * s.y)


def from_group_coords(rs: ReducedState, rho, t0=0.0, guess=None) -> State:
    t = invert_time_map(rho, t0, rs.T, guess=guess)
    r, rd = rho.derivs(t)[:2]
    x, y = r * rs.u, r * rs.v
    return State(t, x, y, (rs.uprime + rd * x) / r, (rs.vprime + rd * y) / r)


def autonomous_rhs(G: ExprAst, u, v):
    """``(u'', v'') = (-u + u G(uv), -v + v G(uv))``."""
    k = G(u * v)
    return -u + u * k, -v + v * k


def P_of_q(G: ExprAst, I, J, q, q_ref=1.0, tol=QUAD_TOL):
    """``2I + 4q (J - q + integral_{q_ref}^{q} G)`` by adaptive quadrature."""
    return 2.0 * I + 4.0 * q * (J - q + integral(G, "tau", q_ref, q, tol=tol))


@dataclass(frozen=True)
class EllipticP:
    """``P(q)`` for ``G = c1/tau^2 + c2 + c3 tau + c4 tau^2`` as a quartic.

    ``coeffs[k]`` multiplies ``q^k``; ``offset`` is the part of the linear
    coefficient that comes from the lower limit ``q_ref``.
    """

    coeffs: tuple
    offset: float

    @property
    def degree(self):
        nz = [k for k, c in enumerate(self.coeffs) if c != 0.0]
        return nz[-1] if nz else 0

    def __call__(self, q):
        return float(np.polynomial.polynomial.polyval(q, self.coeffs))


def elliptic_P_coeffs(c1, c2, c3, c4, I, J, q_ref=1.0) -> EllipticP:
    if c1 != 0.0 and not q_ref > 0.0:
        raise ConfigError("q_ref must be positive when c1 != 0")
    A_ref = (-c1 / q_ref if c1 != 0.0 else 0.0) + c2 * q_ref + c3 * q_ref ** 2 / 2 + c4 * q_ref ** 3 / 3
    k_ref = -4.0 * A_ref
    coeffs = (2.0 * I - 4.0 * c1, 4.0 * J + k_ref, 4.0 * c2 - 4.0, 2.0 * c3, 4.0 * c4 / 3.0)
    return EllipticP(coeffs, k_ref)


class QPath:
    """Dense ``q(T)`` from the second-order reduced equation."""

    def __init__(self, dense):
        self.dense = dense

    @property
    def window(self):
        return self.dense.t_min, self.dense.t_max

    def value(self, T):
        return self.dense.component(0, T)

    def deriv(self, T):
        return self.dense.component(1, T)

    __call__ = value


def q_ode_solve(G: ExprAst, I, J, q0, qprime0, T_grid, q_ref=1.0, tol=1e-8,
                cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Integrate ``q'' = P'(q)/2 = 2J - 4q + 2 Phi(q) + 2q G(q)``.

    ``Phi`` is carried as a third state component (``Phi' = G(q) q'``), so no
    quadrature runs inside the right-hand side. Returns ``(QPath, q, q')``
    sampled on ``T_grid`` (which must start at 0).
    """
    G = _require_vars(G, G_VARS, "G")
    if not q0 > 0.0:
        raise ConfigError(f"q0 = x0 y0 / rho0^2 must be positive, got {q0!r}")
    mismatch = qprime0 ** 2 - P_of_q(G, I, J, q0, q_ref)
    if abs(mismatch) > tol * max(1.0, qprime0 ** 2):
        raise ConfigError(f"(I, J, q0, q0') inconsistent: q0'^2 - P(q0) = {mismatch:.3g}")
    T_grid = [float(T) for T in T_grid]
    if T_grid[0] != 0.0:
        raise ConfigError("T_grid must start at 0")

    def f(T, z):
        q = z[0]
        if not q > 0.0:
            raise SingularConfigurationError(f"q collapsed to {q!r} at T={T!r}")
        k = G(q)
        return (z[1], 2.0 * J - 4.0 * q + 2.0 * z[2] + 2.0 * q * k, k * z[1])

    phi0 = integral(G, "tau", q_ref, q0, tol=QUAD_TOL)
    sol = solve_ivp(f, 0.0, (q0, qprime0, phi0), T_grid[-1], cfg, grid=T_grid, dense=True)
    return QPath(sol.dense), sol.y[:, 0].copy(), sol.y[:, 1].copy()


def s_from_q(L, q_of_T, s0, T_grid, tol=1e-13):
    """``s(T) = s0 exp(L integral_0^T dT'/q)``; ``L`` is the signed ``sqrt(2I)``."""
    if not s0 > 0.0:
        raise ConfigError(f"s0 must be positive, got {s0!r}")
    T_grid = np.asarray(T_grid, dtype=float)
    if L == 0.0:
        return np.full(len(T_grid), float(s0))

    def inv_q(T):
        q = q_of_T(T)
        if not q > 0.0:
            raise SingularConfigurationError(f"q = {q!r} <= 0 at T={T!r}")
        return 1.0 / q

    acc = 0.0
    out = [float(s0)]
    for a, b in zip(T_grid[:-1], T_grid[1:]):
        part, _, _ = K.adaptive_quad(inv_q, float(a), float(b), tol)
        acc += part
        out.append(s0 * math.exp(L * acc))
    return np.array(out)


@dataclass
class QuadratureSolution:
    T: np.ndarray
    q: np.ndarray
    qprime: np.ndarray
    s: np.ndarray
    I: float
    J: float
    L: float
    q_ref: float
    qpath: QPath = field(repr=False)
    L_residual: np.ndarray = field(repr=False)
    P_residual: np.ndarray = field(repr=False)
    turning_points: int = 0

    @property
    def sprime(self):
        return self.s * self.L / self.q


def quadrature_solution(G, I, J, L, q0, qprime0, s0, T_grid, q_ref=1.0,
                        cfg: IntegratorConfig = DEFAULT_CONFIG) -> QuadratureSolution:
    """Run :func:`q_ode_solve` and :func:`s_from_q` and record both residuals.

    ``L_residual`` is ``q d(ln s)/dT - L`` with the derivative taken by finite
    differences of the sampled ``s``; ``P_residual`` is ``q'^2 - P(q)`` with ``P``
    from fresh quadrature.
    """
    if abs(0.5 * L * L - I) > 1e-12 * max(1.0, I):
        raise ConfigError(f"L^2/2 = {0.5 * L * L!r} does not match I = {I!r}")
    qpath, q, qp = q_ode_solve(G, I, J, q0, qprime0, T_grid, q_ref, cfg=cfg)
    s = s_from_q(L, qpath, s0, T_grid)
    T = np.asarray(T_grid, dtype=float)
    l_res = q * differentiate(T, np.log(s)) - L if len(T) >= 7 else np.zeros(len(T))
    p_res = np.array([qpi ** 2 - P_of_q(G, I, J, qi, q_ref) for qi, qpi in zip(q, qp)])
    signs = np.sign(qp[qp != 0.0])
    turning = int(np.count_nonzero(signs[1:] != signs[:-1]))
    return QuadratureSolution(T, q, qp, s, I, J, L, q_ref, qpath, l_res, p_res, turning)


def back_map(rho, sol: QuadratureSolution, signs0, t0=0.0) -> Trajectory:
    """``x = sx rho sqrt(q/s)``, ``y = sy rho sqrt(q s)`` on the solution grid.

    Since ``q`` and ``s`` stay positive neither coordinate can cross zero, so
    the initial signs hold throughout. Velocities follow analytically from
    ``u' = (q' - L)/(2 u s)`` and ``v' = s (q' + L)/(2 v)``.
    """
    sx, sy = (1.0 if v >= 0 else -1.0 for v in signs0)
    samples = []
    guess = None
    for T, q, qp, s in zip(sol.T, sol.q, sol.qprime, sol.s):
        if not (q > 0.0 and s > 0.0):
            raise SingularConfigurationError(f"q={q!r}, s={s!r} must be positive at T={T!r}")
        u = sx * math.sqrt(q / s)
        v = sy * math.sqrt(q * s)
        rs = ReducedState(float(T), u, v, (qp - sol.L) / (2.0 * u * s), s * (qp + sol.L) / (2.0 * v))
        st = from_group_coords(rs, rho, t0, guess)
        guess = st.t
        samples.append(st)
    return Trajectory(samples, {"system": "rayreid-quadrature", "I": sol.I, "J": sol.J})


def reduce_rayreid(spec: RayReidSpec, s0: State, t_grid, q_ref=1.0,
                   cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Full pipeline from an initial state to a back-mapped trajectory.

    Returns ``(QuadratureSolution, Trajectory)``; the trajectory is sampled at
    the images of ``t_grid`` (which must start at ``s0.t``).
    """
    t_grid = [float(t) for t in t_grid]
    if t_grid[0] != s0.t:
        raise ConfigError("t_grid must start at the initial time")
    rs = to_group_coords(s0, spec.rho, s0.t)
    q0 = rs.q
    if not q0 > 0.0:
        raise ConfigError("the quadrature route needs x0 y0 > 0")
    L = rs.L
    I = 0.5 * L * L
    J = rs.uprime * rs.vprime + q0 - integral(spec.G, "tau", q_ref, q0, tol=QUAD_TOL)
    T_grid = [0.0]
    for a, b in zip(t_grid[:-1], t_grid[1:]):
        T_grid.append(T_grid[-1] + time_map_T(spec.rho, a, b))
    sol = quadrature_solution(spec.G, I, J, L, q0, rs.qprime, rs.s, T_grid, q_ref, cfg)
    if np.any(~np.isfinite(sol.s)):
        raise NumericalError("non-finite s")
    traj = back_map(spec.rho, sol, (s0.x, s0.y), s0.t)
    return sol, traj
