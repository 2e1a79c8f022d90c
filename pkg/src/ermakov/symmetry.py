"""Finite flow of the symmetry generator ``rho^2 d/dt + rho rho' (x d/dx + y d/dy)``.

Along the flow the group time ``T = integral rho^-2 dt`` advances by ``eps``
while ``x/rho``, ``y/rho``, ``rho x' - rho' x`` and ``rho y' - rho' y`` stay fixed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError, RootFindingError
from .numdiff import differentiate
from .ode import State, Trajectory
from .roots import bisect_secant, expand_bracket
from .systems import rhs_generalized, sigma_star

QUAD_TOL = 1e-14
DEFAULT_HORIZON = 1e4
BRACKET_QUAD_TOL = 1e-9


@dataclass(frozen=True)
class GroupParams:
    rho: object
    t0: float = 0.0
    eps: float = 0.0
    window: tuple | None = None


def time_map_T(rho, t0, t, tol=QUAD_TOL):
    """Group time ``T(t) = integral_{t0}^{t} rho^-2``; strictly increasing in ``t``."""
    return rho.inverse_square_integral(float(t0), float(t), tol)


def invert_time_map(rho, t0, T, tol=1e-12, guess=None, horizon=DEFAULT_HORIZON):
    """Solve ``T(t) = T`` for ``t`` by bracketing plus bisection/secant.

    Paths are searched inside their window; closed-form ``rho`` up to
    ``horizon`` away from the starting point.
    """
    t0 = float(t0)
    T = float(T)
    if T == 0.0:
        return t0
    qtol = min(QUAD_TOL, 0.01 * tol)
    start = t0 if guess is None else float(guess)
    T_start = time_map_T(rho, t0, start, qtol) if start != t0 else 0.0

    def f(t, qtol=qtol):
        # integrate from the start point: shorter ranges, same monotone map
        return T_start + time_map_T(rho, start, t, qtol)

    last = [start, T_start]

    def rough(t):
        # bracketing only needs signs, and visits points moving away from the
        # start; accumulate piece by piece so long ranges stay within budget
        t0_, T0_ = last
        value = T0_ + time_map_T(rho, t0_, t, BRACKET_QUAD_TOL)
        last[:] = [t, value]
        return value

    window = getattr(rho, "window", None)
    r0 = rho.derivs(start)[0]
    step = (T - T_start) * r0 * r0
    if step == 0.0:
        return start
    if window is not None:
        lo, hi = window
        edge = hi if step > 0 else lo
        f_edge = rough(edge)
        if (step > 0 and f_edge < T) or (step < 0 and f_edge > T):
            raise RootFindingError(f"T={T!r} not attainable inside the window [{lo!r}, {hi!r}]")
        horizon = abs(edge - start)
    a, b = expand_bracket(rough, T, start, step, horizon)
    if a == b:
        return a
    # the loose bracket may miss by about BRACKET_QUAD_TOL; widen until the tight map agrees
    pad = abs(step) * 1e-6 + 1e-12
    while (f(a) - T) > 0.0:
        a -= pad
        pad *= 2.0
    pad = abs(step) * 1e-6 + 1e-12
    while (f(b) - T) < 0.0:
        b += pad
        pad *= 2.0
    return bisect_secant(f, T, a, b, ftol=tol)


def apply_flow(gp: GroupParams, s: State) -> State:
    """Move ``s`` by group parameter ``gp.eps``."""
    if gp.eps == 0.0:
        return s
    rho = gp.rho
    t_new = invert_time_map(rho, s.t, gp.eps)
    if gp.window is not None and not (gp.window[0] <= t_new <= gp.window[1]):
        raise DomainError(f"flow image t={t_new!r} leaves the window {gp.window!r}")
    r, rd, _ = rho.derivs(s.t)
    rn, rdn, _ = rho.derivs(t_new)
    x = s.x * rn / r
    y = s.y * rn / r
    b1 = r * s.xdot - rd * s.x
    b2 = r * s.ydot - rd * s.y
    return State(t_new, x, y, (b1 + rdn * x) / rn, (b2 + rdn * y) / rn)


def transform_trajectory(traj, gp: GroupParams):
    """Apply the flow to every sample; samples whose image is undefined are dropped.

    Returns ``(states, n_dropped)``.
    """
    out = []
    dropped = 0
    for s in traj:
        try:
            out.append(apply_flow(gp, s))
        except (RootFindingError, DomainError):
            dropped += 1
    return out, dropped


@dataclass
class SolutionMapResult:
    max_residual: float
    n_used: int
    n_dropped: int
    times: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)


def _resample_in_group_time(traj, gp, n):
    """States of ``traj`` at preimages, uniform in group time, of the window."""
    w0, w1 = gp.window
    T1 = time_map_T(gp.rho, w0, w1)
    lo = max(0.0, -gp.eps)
    hi = min(T1, T1 - gp.eps)
    if not hi > lo:
        raise NumericalError(f"no part of the trajectory maps into the window with eps={gp.eps!r}")
    out = []
    guess = None
    for T in np.linspace(lo, hi, n):
        t = invert_time_map(gp.rho, w0, float(T), guess=guess)
        t = min(max(t, traj.samples[0].t), traj.samples[-1].t)
        out.append(traj.state_at(t))
        guess = t
    return out


def solution_map_check(sys, traj, gp: GroupParams, width=7, n_samples=None) -> SolutionMapResult:
    """Transform a sampled solution and test it against the equations of motion.

    The window defaults to the time span of ``traj``. When ``traj`` carries
    dense output it is first resampled uniformly in group time over the part
    whose image lands in the window, so the image curve is evenly resolved.
    Accelerations of the image come from ``width``-point finite differences of
    its transformed velocities; residuals are ``|a_fit - a_rhs| / (1 + |a_rhs|)``.
    """
    samples = list(traj)
    if gp.window is None:
        gp = GroupParams(gp.rho, gp.t0, gp.eps, (samples[0].t, samples[-1].t))
    if getattr(traj, "dense", None) is not None:
        samples = _resample_in_group_time(traj, gp, n_samples or len(samples))
    states, dropped = transform_trajectory(samples, gp)
    if len(states) < width:
        raise NumericalError(
            f"only {len(states)} samples survive the flow with eps={gp.eps!r}; need {width}")
    ts = np.array([s.t for s in states])
    ax_fit = differentiate(ts, [s.xdot for s in states], width)
    ay_fit = differentiate(ts, [s.ydot for s in states], width)
    res = np.empty(len(states))
    for i, s in enumerate(states):
        ax, ay = rhs_generalized(sys, s)
        res[i] = max(abs(ax_fit[i] - ax) / (1.0 + abs(ax)), abs(ay_fit[i] - ay) / (1.0 + abs(ay)))
    return SolutionMapResult(float(np.max(res)), len(states), dropped, ts, res)


def solution_map_residual(sys, traj, gp: GroupParams) -> float:
    return solution_map_check(sys, traj, gp).max_residual


@dataclass
class SymmetryWitness:
    state: State | None
    eps: float
    deviation: float
    table: list = field(default_factory=list, repr=False)


def is_symmetric_frequency(Omega2, rho, sample_states, eps_list, tol=1e-9):
    """Test invariance of ``rho^4 (W2 + rho''/rho)`` along group orbits.

    Returns ``(verdict, witness)``; the witness holds the worst state, ``eps``
    and scaled deviation ``|d sigma*| / (1 + |sigma*|)``, plus the per-``eps``
    maximum deviations in ``table``.
    """
    worst = SymmetryWitness(None, 0.0, -math.inf)
    evaluated = 0
    for eps in eps_list:
        gp = GroupParams(rho, eps=eps)
        eps_max = 0.0
        for s in sample_states:
            try:
                moved = apply_flow(gp, s)
            except (RootFindingError, DomainError):
                continue
            base = sigma_star(Omega2, rho, s)
            dev = abs(sigma_star(Omega2, rho, moved) - base) / (1.0 + abs(base))
            evaluated += 1
            eps_max = max(eps_max, dev)
            if dev > worst.deviation:
                worst = SymmetryWitness(s, eps, dev, worst.table)
        worst.table.append((eps, eps_max))
    if evaluated == 0:
        raise NumericalError("no sample state could be moved by any eps")
    return worst.deviation <= tol, worst
