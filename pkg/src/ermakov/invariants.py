"""First integrals of Ermakov and Ray-Reid systems and drift reporting.

Indefinite integrals carry a configurable lower limit (``r_ref``, ``q_ref``,
default 1). Changing it shifts the invariant by a constant, so drifts do not
depend on it but absolute values do.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, SingularConfigurationError
from .expr import Dual, integral
from .ode import State
from .systems import TINY, RayReidSpec

QUAD_TOL = 1e-13


class InvariantEvaluationError(NumericalError):
    def __init__(self, index, cause):
        super().__init__(f"invariant evaluation failed at sample {index}: {cause}")
        self.index = index
        self.cause = cause


@dataclass
class InvariantReport:
    name: str
    values: np.ndarray
    max_abs_drift: float
    max_rel_drift: float

    def __len__(self):
        return len(self.values)


def ermakov_lewis_I(F, s: State, r_ref=1.0, tol=QUAD_TOL):
    """``(x y' - y x')^2 / 2 + integral_{r_ref}^{y/x} F``."""
    L = s.x * s.ydot - s.y * s.xdot
    value = 0.5 * L * L
    if F.is_zero:
        return value
    if abs(s.x) < TINY:
        raise SingularConfigurationError(f"Ermakov-Lewis invariant singular at x={s.x!r}")
    return value + integral(F, "r", r_ref, s.y / s.x, tol=tol)


def angular_momentum(s: State):
    return s.x * s.ydot - s.y * s.xdot


def rayreid_J(spec: RayReidSpec, s: State, q_ref=1.0, tol=QUAD_TOL):
    """Ray-Reid first integral
    ``(rho x' - rho' x)(rho y' - rho' y) + xy/rho^2 - integral_{q_ref}^{xy/rho^2} G``."""
    r, rd, _ = spec.rho.derivs(s.t)
    b1 = r * s.xdot - rd * s.x
    b2 = r * s.ydot - rd * s.y
    q = s.x * s.y / (r * r)
    return b1 * b2 + q - integral(spec.G, "tau", q_ref, q, tol=tol)


def _hamiltonian(spec, t, x, y, px, py, q_ref, tol):
    r = spec.rho.derivs(t)[0]
    r2 = r * r
    w2 = spec.omega2.value(t)
    return px * py + w2 * x * y - integral(spec.G, "tau", q_ref, x * y / r2, tol=tol) / r2


def hamiltonian_H(spec: RayReidSpec, s: State, q_ref=1.0, tol=QUAD_TOL):
    """``p_x p_y + w^2 x y - rho^-2 integral^{xy/rho^2} G`` with ``p_x = y'``, ``p_y = x'``.

    The cross identification of momenta is the one for which Hamilton's
    equations of this ``H`` reproduce the coupled oscillator pair.
    """
    return _hamiltonian(spec, s.t, s.x, s.y, s.ydot, s.xdot, q_ref, tol)


def hamiltonian_gradient(spec: RayReidSpec, t, x, y, px, py, q_ref=1.0, tol=QUAD_TOL):
    """``(dH/dx, dH/dy, dH/dp_x, dH/dp_y)`` by forward-mode AD."""
    args = [x, y, px, py]
    grad = []
    for i in range(4):
        seeded = [Dual(a, 1.0 if j == i else 0.0) for j, a in enumerate(args)]
        out = _hamiltonian(spec, t, *seeded, q_ref, tol)
        grad.append(out.eps)
    return tuple(grad)


def reduced_K(u, v, pu, pv, G, q_ref=1.0, tol=QUAD_TOL):
    """``p_u p_v + uv - integral_{q_ref}^{uv} G`` (``p_u = v'``, ``p_v = u'``)."""
    return pu * pv + u * v - integral(G, "tau", q_ref, u * v, tol=tol)


def drift_report(traj, invariant, name="") -> InvariantReport:
    """Evaluate ``invariant(state)`` along ``traj`` and measure drift from sample 0.

    ``max_rel_drift`` divides by ``|value[0]|``; when that is exactly zero the
    absolute drift is reported in its place.
    """
    samples = list(traj)
    if len(samples) < 2:
        raise ValueError("drift report needs at least two samples")
    values = np.empty(len(samples))
    for i, s in enumerate(samples):
        try:
            values[i] = invariant(s)
        except NumericalError as exc:
            raise InvariantEvaluationError(i, exc) from exc
    dev = np.abs(values - values[0])
    max_abs = float(np.max(dev))
    ref = abs(values[0])
    return InvariantReport(name, values, max_abs, max_abs / ref if ref > 0.0 else max_abs)
