"""Initial-value integration with Dormand-Prince 5(4) or classical RK4.

Dense output on accepted steps is the cubic Hermite interpolant through the
end values and slopes, plus, for Dormand-Prince steps, the fifth coefficient
of the method's continuous extension (fourth-order accurate).
"""
from __future__ import annotations

import bisect
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NonFiniteStateError, StepSizeUnderflowError

log = logging.getLogger(__name__)

METHODS = ("dp45", "rk4")

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# continuous extension coefficients (Hairer, Norsett & Wanner)
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_BETA = 0.04
PI_ALPHA = 0.2 - 0.75 * PI_BETA


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "dp45"
    rtol: float = 1e-10
    atol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-14
    h_max: float = math.inf
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not (0.0 < self.h_min <= self.h_init <= self.h_max):
            raise ValueError("need 0 < h_min <= h_init <= h_max")
        if self.rtol <= 0.0 or self.atol <= 0.0:
            raise ValueError("rtol and atol must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")

    def replace(self, **changes) -> "IntegratorConfig":
        d = asdict(self)
        d.update(changes)
        return IntegratorConfig(**d)


@dataclass(frozen=True)
class State:
    t: float
    x: float
    y: float
    xdot: float
    ydot: float

    def __post_init__(self):
        for name in ("t", "x", "y", "xdot", "ydot"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise NonFiniteStateError(f"state field {name} is {v!r}", self.t)

    def as_tuple(self):
        return (self.t, self.x, self.y, self.xdot, self.ydot)

    def replace(self, **changes) -> "State":
        d = asdict(self)
        d.update(changes)
        return State(**d)


class DenseSolution:
    """Piecewise polynomial interpolant over accepted steps.

    On a step of length ``h`` starting at ``t_k``, with ``th = (t - t_k)/h``::

        y = r1 + th*(r2 + (1-th)*(r3 + th*(r4 + (1-th)*r5)))

    ``r1..r4`` are fixed by the end values and slopes (cubic Hermite); ``r5``
    is the Dormand-Prince continuous-extension term, zero for plain Hermite
    segments.
    """

    def __init__(self, ts, ys, fs, r5=None):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.fs = np.asarray(fs, dtype=float)
        h = np.diff(self.ts)[:, None]
        self.r1 = self.ys[:-1]
        self.r2 = self.ys[1:] - self.ys[:-1]
        self.r3 = h * self.fs[:-1] - self.r2
        self.r4 = self.r2 - h * self.fs[1:] - self.r3
        if r5 is None or len(r5) == 0:
            self.r5 = np.zeros_like(self.r1)
        else:
            self.r5 = np.asarray(r5, dtype=float)
        self._tl = self.ts.tolist()

    @property
    def t_min(self):
        return self._tl[0]

    @property
    def t_max(self):
        return self._tl[-1]

    def _segment(self, t):
        if t < self._tl[0] or t > self._tl[-1]:
            raise ValueError(f"t={t!r} outside [{self._tl[0]!r}, {self._tl[-1]!r}]")
        k = bisect.bisect_right(self._tl, t) - 1
        return min(k, len(self._tl) - 2)

    def _theta(self, k, t):
        h = self._tl[k + 1] - self._tl[k]
        return (t - self._tl[k]) / h, h

    def __call__(self, t):
        k = self._segment(t)
        th, _ = self._theta(k, t)
        return _poly(th, self.r1[k], self.r2[k], self.r3[k], self.r4[k], self.r5[k])

    def component(self, i, t):
        k = self._segment(t)
        th, _ = self._theta(k, t)
        return float(_poly(th, self.r1[k, i], self.r2[k, i], self.r3[k, i], self.r4[k, i],
                           self.r5[k, i]))

    def derivative(self, t):
        k = self._segment(t)
        th, h = self._theta(k, t)
        return _poly_deriv(th, self.r2[k], self.r3[k], self.r4[k], self.r5[k]) / h

    def component_vec(self, i, ts):
        """Component ``i`` at an array of times."""
        ts = np.asarray(ts, dtype=float)
        k = np.clip(np.searchsorted(self.ts, ts, side="right") - 1, 0, len(self.ts) - 2)
        th = (ts - self.ts[k]) / (self.ts[k + 1] - self.ts[k])
        return _poly(th, self.r1[k, i], self.r2[k, i], self.r3[k, i], self.r4[k, i], self.r5[k, i])


def _poly(th, r1, r2, r3, r4, r5):
    th1 = 1.0 - th
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))


def _poly_deriv(th, r2, r3, r4, r5):
    th1 = 1.0 - th
    R = r4 + th1 * r5
    Q = r3 + th * R
    P = r2 + th1 * Q
    return P + th * (-Q + th1 * (R - th * r5))


@dataclass
class Solution:
    """Raw result of :func:`solve_ivp`."""

    t: np.ndarray
    y: np.ndarray
    accepted: int
    rejected: int
    dense: DenseSolution | None = None


def _check_finite(y, t):
    if not np.all(np.isfinite(y)):
        raise NonFiniteStateError(f"non-finite state encountered at t={t!r}", t)


def solve_ivp(f, t0, y0, t_end, cfg: IntegratorConfig, grid=None, dense=False) -> Solution:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end`` (``t_end > t0``).

    ``grid`` lists output times inside ``[t0, t_end]`` in increasing order;
    by default only the two end points are reported.
    """
    t0 = float(t0)
    t_end = float(t_end)
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    y = np.array(y0, dtype=float)
    _check_finite(y, t0)
    grid = [t0, t_end] if grid is None else [float(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if grid and (grid[0] < t0 or grid[-1] > t_end):
        raise ValueError("grid must lie inside [t0, t_end]")

    out_t, out_y = [], []
    gi = 0
    while gi < len(grid) and grid[gi] == t0:
        out_t.append(t0)
        out_y.append(y.copy())
        gi += 1

    fy = np.asarray(f(t0, y), dtype=float)
    _check_finite(fy, t0)
    steps_t, steps_y, steps_f, steps_r5 = [t0], [y.copy()], [fy.copy()], []
    t = t0
    accepted = rejected = 0
    err_old = 1e-4
    h = min(cfg.h_init, cfg.h_max) if cfg.method == "dp45" else cfg.h_init
    step_fn = _dp45_step if cfg.method == "dp45" else _rk4_step
    last_rejected = False

    while t < t_end:
        if accepted + rejected >= cfg.max_steps:
            raise StepSizeUnderflowError(
                f"max_steps={cfg.max_steps} exhausted at t={t!r}", t, y.copy())
        final = False
        if t + h >= t_end or (cfg.method == "rk4" and t + h * (1 + 1e-9) >= t_end):
            h = t_end - t
            final = True
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                y_new, f_new, err, r5 = step_fn(f, t, y, fy, h, cfg)
        except NonFiniteStateError:
            # an intermediate stage overflowed; retry with a smaller step
            if cfg.method != "dp45":
                raise
            y_new = f_new = r5 = None
            err = math.inf
        if cfg.method == "dp45" and not err <= 1.0:
            rejected += 1
            if not math.isfinite(err):
                fac = FAC_MIN
            else:
                fac = max(FAC_MIN, min(1.0, SAFETY * err ** (-0.2)))
            h *= fac
            last_rejected = True
            if h < cfg.h_min:
                raise StepSizeUnderflowError(
                    f"step size {h:.3g} below h_min={cfg.h_min:g} at t={t!r}", t, y.copy())
            continue
        _check_finite(y_new, t + h)
        _check_finite(f_new, t + h)
        t_new = t_end if final else t + h
        while gi < len(grid) and grid[gi] <= t_new:
            tg = grid[gi]
            out_t.append(tg)
            if tg == t_new:
                out_y.append(y_new.copy())
            else:
                hh = t_new - t
                d = y_new - y
                r3 = hh * fy - d
                out_y.append(_poly((tg - t) / hh, y, d, r3, d - hh * f_new - r3, r5))
            gi += 1
        if dense:
            steps_t.append(t_new)
            steps_y.append(y_new.copy())
            steps_f.append(f_new.copy())
            steps_r5.append(r5)
        accepted += 1
        t, y, fy = t_new, y_new, f_new
        if cfg.method == "dp45":
            err = max(err, 1e-10)
            fac = SAFETY * err ** (-PI_ALPHA) * err_old ** PI_BETA
            fac = max(FAC_MIN, min(FAC_MAX, fac))
            if last_rejected:
                fac = min(fac, 1.0)
            err_old = max(err, 1e-4)
            h = min(h * fac, cfg.h_max)
            last_rejected = False

    log.debug("solve_ivp: %d accepted, %d rejected steps", accepted, rejected)
    sol = Solution(np.array(out_t), np.array(out_y), accepted, rejected)
    if dense:
        sol.dense = DenseSolution(steps_t, steps_y, steps_f, steps_r5)
    return sol


def _dp45_step(f, t, y, fy, h, cfg):
    k = [fy]
    for i in range(1, 7):
        yi = y.copy()
        for j, a in enumerate(_A[i]):
            if a:
                yi += (h * a) * k[j]
        k.append(np.asarray(f(t + _C[i] * h, yi), dtype=float))
        if i == 6:
            y_new = yi
    err_vec = sum((h * e) * kj for e, kj in zip(_E, k) if e)
    scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
    err = float(np.max(np.abs(err_vec) / scale))
    r5 = h * sum(d * kj for d, kj in zip(_D, k) if d)
    return y_new, k[6], err, r5


def _rk4_step(f, t, y, fy, h, cfg):
    k1 = fy
    k2 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k1), dtype=float)
    k3 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k2), dtype=float)
    k4 = np.asarray(f(t + h, y + h * k3), dtype=float)
    y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y_new, np.asarray(f(t + h, y_new), dtype=float), 0.0, np.zeros_like(y)


@dataclass
class Trajectory:
    """Time-ordered samples of a planar state."""

    samples: list
    metadata: dict = field(default_factory=dict)
    dense: DenseSolution | None = None

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def __iter__(self):
        return iter(self.samples)

    def column(self, name):
        return np.array([getattr(s, name) for s in self.samples])

    @property
    def t(self):
        return self.column("t")

    def state_at(self, t):
        if self.dense is None:
            raise ValueError("trajectory was integrated without dense output")
        x, y, xd, yd = self.dense(t)
        return State(t, float(x), float(y), float(xd), float(yd))


def integrate(rhs, s0: State, t_end, cfg: IntegratorConfig, grid=None, dense=False,
              system_id="") -> Trajectory:
    """Integrate a planar second-order system ``(x'', y'') = rhs(state)``."""

    def f(t, u):
        ax, ay = rhs(State(t, u[0], u[1], u[2], u[3]))
        return (u[2], u[3], ax, ay)

    sol = solve_ivp(f, s0.t, (s0.x, s0.y, s0.xdot, s0.ydot), t_end, cfg, grid, dense)
    samples = [State(float(t), *map(float, u)) for t, u in zip(sol.t, sol.y)]
    meta = {
        "system": system_id,
        "config": asdict(cfg),
        "accepted_steps": sol.accepted,
        "rejected_steps": sol.rejected,
    }
    return Trajectory(samples, meta, sol.dense)


def uniform_grid(t0, t_end, n):
    """``n`` equally spaced points including both end points."""
    if n < 2:
        return [t0]
    return [t0 + (t_end - t0) * k / (n - 1) for k in range(n - 1)] + [t_end]
