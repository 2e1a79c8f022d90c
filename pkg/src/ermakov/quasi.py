"""Rescaling by an oscillator solution ``C(t)`` that removes ``w(t)``.

With ``C'' + w^2 C = 0`` the substitution ``xb = x/C``, ``yb = y/C``,
``tb = integral dt/C^2`` turns the time-dependent pair into the autonomous one
``xb'' = f(yb/xb)/(yb xb^2)``, ``yb'' = g(xb/yb)/(xb yb^2)``.
"""
from __future__ import annotations

import logging
import warnings

import numpy as np

from .errors import ConfigError, NumericalError, SingularConfigurationError
from .expr import ExprAst
from .numdiff import differentiate, local_derivative
from .ode import IntegratorConfig, State, solve_ivp
from .paths import HermitePath, as_omega2
from .symmetry import invert_time_map, time_map_T
from .systems import TIME_VARS, TINY, rhs_traditional

log = logging.getLogger(__name__)

DEFAULT_CONFIG = IntegratorConfig(rtol=1e-12, atol=1e-14, h_max=0.02)


class CPath(HermitePath):
    """Numerical solution of ``C'' + w^2 C = 0``; ``C''`` comes from the equation."""

    def derivs(self, t):
        self._check(t)
        c = self.dense.component(0, t)
        return c, self.dense.component(1, t), -self.omega2.value(t) * c

    def residuals(self, ts, h=1e-3):
        """``C'' + w^2 C`` with ``C''`` from a local stencil on the interpolated ``C'``."""
        lo, hi = self.window
        return np.array([local_derivative(self.deriv, t, h, lo, hi) + self.omega2.value(t) * self.value(t)
                         for t in np.asarray(ts, dtype=float)])


def _time_only(omega):
    if isinstance(omega, ExprAst):
        extra = omega.free_vars - {"t"}
        if extra:
            raise ConfigError(
                f"the rescaling needs w = w(t); w depends on dynamical variables {sorted(extra)}")
        return omega.with_vars(TIME_VARS)
    if not getattr(omega, "time_only", True):
        raise ConfigError("the rescaling needs a frequency that depends on t only")
    return omega


def oscillator_path(omega, C0, Cdot0, t0, t_end, cfg: IntegratorConfig = DEFAULT_CONFIG) -> CPath:
    """Any solution of ``C'' + w^2 C = 0`` on ``[t0, t_end]``, zeros allowed."""
    if C0 == 0.0 and Cdot0 == 0.0:
        raise ConfigError("(C0, Cdot0) must not both vanish")
    omega2 = as_omega2(_time_only(omega))

    def f(t, u):
        return (u[1], -omega2.value(t) * u[0])

    sol = solve_ivp(f, t0, (C0, Cdot0), t_end, cfg, dense=True)
    return CPath(sol.dense, omega2)


def solve_tdho(omega, C0, Cdot0, t0, t_end, cfg: IntegratorConfig = DEFAULT_CONFIG) -> CPath:
    """Integrate ``C'' + w^2 C = 0`` on ``[t0, t_end]`` for use as a rescaling.

    If ``C`` changes sign the usable window stops at the last step node before
    the first zero, and a warning is issued.
    """
    if C0 == 0.0 and Cdot0 != 0.0:
        raise SingularConfigurationError(f"C vanishes at the start t={t0!r}")
    path = oscillator_path(omega, C0, Cdot0, t0, t_end, cfg)
    ts = path.dense.ts
    bad = np.nonzero(np.sign(path.dense.ys[:, 0]) != np.sign(C0))[0]
    if len(bad):
        hi = float(ts[bad[0] - 1])
        msg = f"C changes sign before t={float(ts[bad[0]])!r}; window truncated to [{t0!r}, {hi!r}]"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        log.warning(msg)
        path.window = (float(t0), hi)
    return path


def quasi_transform(cpath, s: State, t0) -> State:
    """Map ``s`` to ``(tb, xb, yb, xb', yb')``; primes are ``d/dtb``."""
    c, cd = cpath.derivs(s.t)[:2]
    if abs(c) < TINY:
        raise SingularConfigurationError(f"C vanishes at t={s.t!r}")
    tb = time_map_T(cpath, t0, s.t)
    return State(tb, s.x / c, s.y / c, c * s.xdot - cd * s.x, c * s.ydot - cd * s.y)


def quasi_inverse(cpath, sb: State, t0, tol=1e-13) -> State:
    """Inverse of :func:`quasi_transform`."""
    t = invert_time_map(cpath, t0, sb.t, tol=tol)
    c, cd = cpath.derivs(t)[:2]
    x, y = c * sb.x, c * sb.y
    return State(t, x, y, (sb.xdot + cd * x) / c, (sb.ydot + cd * y) / c)


def transform_trajectory(cpath, traj, t0):
    return [quasi_transform(cpath, s, t0) for s in traj]


def sl2_accelerations(f: ExprAst, g: ExprAst, sb: State):
    x, y = sb.x, sb.y
    if abs(x) < TINY or abs(y) < TINY:
        if f.is_zero and g.is_zero:
            return 0.0, 0.0
        raise SingularConfigurationError(f"singular transformed state xb={x!r}, yb={y!r}")
    ax = 0.0 if f.is_zero else f(y / x) / (y * x * x)
    ay = 0.0 if g.is_zero else g(x / y) / (x * y * y)
    return ax, ay


def sl2_residuals(f: ExprAst, g: ExprAst, states, width=7):
    """Per-sample ``|a_fit - a| / (1 + |a|)``, maximised over both coordinates.

    ``a_fit`` is a finite-difference derivative of the transformed velocities.
    """
    if len(states) < width:
        raise NumericalError(f"need at least {width} transformed samples, got {len(states)}")
    ts = np.array([s.t for s in states])
    ax_fit = differentiate(ts, [s.xdot for s in states], width)
    ay_fit = differentiate(ts, [s.ydot for s in states], width)
    out = np.empty(len(states))
    for i, s in enumerate(states):
        ax, ay = sl2_accelerations(f, g, s)
        out[i] = max(abs(ax_fit[i] - ax) / (1 + abs(ax)), abs(ay_fit[i] - ay) / (1 + abs(ay)))
    return out


def sl2_residual(f: ExprAst, g: ExprAst, transformed_traj, width=7) -> float:
    return float(np.max(sl2_residuals(f, g, list(transformed_traj), width)))


def sl2_chain_residuals(f: ExprAst, g: ExprAst, cpath, states, t0):
    """Same comparison with ``xb'' = C^2 (C x'' - C'' x)`` and ``x''`` from the
    time-dependent pair itself (frequency taken from ``cpath``).

    No sampled curve is differentiated, so this isolates the algebra of the
    rescaling from integrator and stencil error.
    """
    out = np.empty(len(states))
    for i, s in enumerate(states):
        ax, ay = rhs_traditional(cpath.omega2, f, g, s)
        c, _, cdd = cpath.derivs(s.t)
        bx, by = sl2_accelerations(f, g, quasi_transform(cpath, s, t0))
        gx = c * c * (c * ax - cdd * s.x)
        gy = c * c * (c * ay - cdd * s.y)
        out[i] = max(abs(gx - bx) / (1 + abs(bx)), abs(gy - by) / (1 + abs(by)))
    return out
