"""Solutions ``rho(t)`` of Pinney's equation ``rho'' + w^2(t) rho = rho^-3``."""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, NumericalError, SingularConfigurationError, StepSizeUnderflowError
from .numdiff import local_derivative
from .ode import DenseSolution, IntegratorConfig, solve_ivp
from .paths import HermitePath, as_omega2

DEFAULT_CONFIG = IntegratorConfig(rtol=1e-11, atol=1e-13, h_max=0.02)


class RhoPath(HermitePath):
    """Numerical Pinney solution; ``rho''`` is taken from the equation itself."""

    def rho(self, t):
        return self.value(t)

    def rhodot(self, t):
        return self.deriv(t)

    def rhoddot(self, t):
        return self.derivs(t)[2]

    def derivs(self, t):
        self._check(t)
        r = self.dense.component(0, t)
        rd = self.dense.component(1, t)
        return r, rd, r ** -3 - self.omega2.value(t) * r

    def samples(self, ts):
        """``(rho, rhodot)`` arrays at ``ts``."""
        return (np.array([self.rho(t) for t in ts]), np.array([self.rhodot(t) for t in ts]))

    def residuals(self, ts, h=1e-3):
        """Pinney residual at ``ts`` with ``rho''`` from a local 7-point stencil
        (spacing ``h``) on the interpolated ``rho'``.

        Independent of the equation-based ``rho''`` used by :meth:`derivs`.
        """
        lo, hi = self.window
        out = []
        for t in np.asarray(ts, dtype=float):
            rdd = local_derivative(self.rhodot, t, h, lo, hi)
            r = self.rho(t)
            out.append(rdd + self.omega2.value(t) * r - r ** -3)
        return np.array(out)

    def node_residuals(self):
        """Residual of the stored ``(rho, rho', rho'')`` at every step node."""
        d = self.dense
        w2 = np.array([self.omega2.value(t) for t in d.ts])
        return d.fs[:, 1] + w2 * d.ys[:, 0] - d.ys[:, 0] ** -3


def solve_pinney(omega, rho0, rhodot0, t0, t_end, cfg: IntegratorConfig = DEFAULT_CONFIG) -> RhoPath:
    """Integrate Pinney's equation on ``[t0, t_end]``.

    ``omega`` is an expression for ``w(t)`` or a time function returning ``w^2``.
    """
    if not rho0 > 0.0:
        raise ConfigError(f"rho0 must be positive, got {rho0!r}")
    omega2 = as_omega2(omega)

    def f(t, u):
        r = u[0]
        if not r > 1e-150:
            raise SingularConfigurationError(f"rho collapsed to {r!r} at t={t!r}")
        return (u[1], r ** -3 - omega2.value(t) * r)

    try:
        sol = solve_ivp(f, t0, (rho0, rhodot0), t_end, cfg, dense=True)
    except StepSizeUnderflowError as exc:
        raise NumericalError(f"Pinney integration failed near t={exc.t!r}: rho -> 0?") from exc
    path = RhoPath(sol.dense, omega2)
    path.stats = {"accepted_steps": sol.accepted, "rejected_steps": sol.rejected}
    return path


class SuperpositionPath(RhoPath):
    """``rho = sqrt(A u^2 + 2 B u v + C v^2)`` evaluated from the dense ``u`` and ``v``.

    ``dense`` still holds the values on the union of both step grids, for
    :meth:`node_residuals` and plotting; point evaluations bypass it.
    """

    def __init__(self, u_path, v_path, A, B, C, dense, window):
        super().__init__(dense, u_path.omega2, window)
        self.u_path, self.v_path = u_path, v_path
        self.A, self.B, self.C = A, B, C

    def _jet(self, t):
        self._check(t)
        u, ud = self.u_path.dense.component(0, t), self.u_path.dense.component(1, t)
        v, vd = self.v_path.dense.component(0, t), self.v_path.dense.component(1, t)
        return _rho_jet(self.A, self.B, self.C, u, ud, v, vd, self.omega2.value(t), t)

    def value(self, t):
        return self._jet(t)[0]

    def deriv(self, t):
        return self._jet(t)[1]

    def derivs(self, t):
        return self._jet(t)

    def _values_vec(self, ts):
        u = self.u_path.dense.component_vec(0, ts)
        v = self.v_path.dense.component_vec(0, ts)
        return np.sqrt(self.A * u * u + 2 * self.B * u * v + self.C * v * v)


def _rho_jet(A, B, C, u, ud, v, vd, w2, t):
    rad = A * u * u + 2 * B * u * v + C * v * v
    if not rad > 0.0:
        raise NumericalError(f"non-positive radicand {rad!r} at t={t!r}")
    r = math.sqrt(rad)
    half_d = A * u * ud + B * (ud * v + u * vd) + C * v * vd
    half_dd = A * (ud * ud - w2 * u * u) + 2 * B * (ud * vd - w2 * u * v) + C * (vd * vd - w2 * v * v)
    rd = half_d / r
    return r, rd, (half_dd - rd * rd) / r


def pinney_superposition(u_path, v_path, A, B, C, wronskian_tol=1e-10) -> RhoPath:
    """``rho = sqrt(A u^2 + 2 B u v + C v^2)`` from two oscillator solutions.

    ``u`` and ``v`` must solve ``c'' + w^2 c = 0`` for the same ``w`` and the
    coefficients must satisfy ``A C - B^2 = 1/W^2`` with ``W = u v' - u' v``.
    """
    omega2 = u_path.omega2
    lo = max(u_path.window[0], v_path.window[0])
    hi = min(u_path.window[1], v_path.window[1])
    t_ref = lo
    W = u_path.value(t_ref) * v_path.deriv(t_ref) - u_path.deriv(t_ref) * v_path.value(t_ref)
    if W == 0.0:
        raise ConfigError("u and v are linearly dependent (zero Wronskian)")
    target = 1.0 / (W * W)
    if abs(A * C - B * B - target) > wronskian_tol * max(1.0, target):
        raise ConfigError(f"A C - B^2 = {A * C - B * B!r} but 1/W^2 = {target!r}")
    ts = np.union1d(u_path.grid, v_path.grid)
    ts = ts[(ts >= lo) & (ts <= hi)]
    jets = np.array([_rho_jet(A, B, C, u_path.value(t), u_path.deriv(t), v_path.value(t),
                              v_path.deriv(t), omega2.value(t), t) for t in ts])
    rho, rhodot, rhoddot = jets.T
    dense = DenseSolution(ts, np.column_stack([rho, rhodot]), np.column_stack([rhodot, rhoddot]))
    path = SuperpositionPath(u_path, v_path, A, B, C, dense, (float(lo), float(hi)))
    path.construction_residual = float(np.max(np.abs(path.node_residuals())))
    return path

def superposition_coefficients(rho0, rhodot0):
    """``(A, B, C)`` reproducing ``rho(t0) = rho0``, ``rho'(t0) = rhodot0`` when
    ``u(t0) = 1, u'(t0) = 0`` and ``v(t0) = 0, v'(t0) = 1`` (so ``W = 1``)."""
    if not rho0 > 0.0:
        raise ConfigError(f"rho0 must be positive, got {rho0!r}")
    A = rho0 * rho0
    B = rho0 * rhodot0
    return A, B, (1.0 + B * B) / A
