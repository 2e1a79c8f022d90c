"""Numerically integrated scalar time functions backed by dense ODE output."""
from __future__ import annotations

import numpy as np

from . import _kernels_py as K
from .errors import DomainError
from .expr import ExprAst
from .systems import TimeFunction

_XGK = np.array(K.XGK)
_WGK = np.array(K.WGK)
_WG = np.array(K.WG)


def as_omega2(omega):
    """Normalise a frequency argument to an object whose ``value(t)`` is ``w^2``.

    An :class:`ExprAst` is read as ``w(t)`` and squared; anything else is
    assumed to already return ``w^2``.
    """
    if isinstance(omega, ExprAst):
        return TimeFunction(omega).squared()
    if isinstance(omega, (int, float)):
        return TimeFunction.constant(float(omega) ** 2)
    return omega


def _gk15_segments(f, lo, hi):
    """Vectorised GK15 over many segments; returns (values, error estimates)."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = np.concatenate([-_XGK[:7], _XGK[::-1]])  # 15 abscissae, ascending
    wk = np.concatenate([_WGK[:7], _WGK[::-1]])
    wg = np.zeros(15)
    wg[[1, 3, 5]] = _WG[:3]
    wg[7] = _WG[3]
    wg[[9, 11, 13]] = _WG[2::-1]
    pts = center[:, None] + half[:, None] * nodes[None, :]
    vals = f(pts)
    resk = half * (vals @ wk)
    resg = half * (vals @ wg)
    return resk, np.abs(resk - resg)


class HermitePath:
    """Scalar function sampled as ``(value, derivative)`` on accepted ODE steps.

    ``dense`` holds components ``[value, derivative]``; ``window`` is the
    interval on which the path may be used.
    """

    def __init__(self, dense, omega2, window=None):
        self.dense = dense
        self.omega2 = omega2
        self.window = window or (dense.t_min, dense.t_max)
        self._cum = None

    @property
    def grid(self):
        return self.dense.ts

    def _check(self, t):
        lo, hi = self.window
        if not (lo <= t <= hi):
            raise DomainError(f"t={t!r} outside the path window [{lo!r}, {hi!r}]")

    def value(self, t):
        self._check(t)
        return self.dense.component(0, t)

    def deriv(self, t):
        self._check(t)
        return self.dense.component(1, t)

    def _values_vec(self, ts):
        return self.dense.component_vec(0, ts)

    def _cumulative(self, tol):
        if self._cum is None:
            ts = self.dense.ts
            lo, hi = ts[:-1], ts[1:]
            f = lambda x: 1.0 / self._values_vec(x) ** 2
            vals, errs = _gk15_segments(f, lo, hi)
            seg_tol = tol / max(len(lo), 1)
            for i in np.nonzero(errs > np.maximum(seg_tol, 50 * K.EPS * np.abs(vals)))[0]:
                vals[i], _, _ = K.adaptive_quad(lambda x: 1.0 / self.dense.component(0, x) ** 2,
                                                lo[i], hi[i], seg_tol)
            self._cum = np.concatenate([[0.0], np.cumsum(vals)])
        return self._cum

    def _antiderivative(self, t, tol):
        cum = self._cumulative(tol)
        ts = self.dense.ts
        k = int(min(max(np.searchsorted(ts, t, side="right") - 1, 0), len(ts) - 2))
        if t == ts[k]:
            return float(cum[k])
        part, _, _ = K.adaptive_quad(lambda x: 1.0 / self.dense.component(0, x) ** 2, ts[k], t, tol)
        return float(cum[k] + part)

    def inverse_square_integral(self, t0, t1, tol=1e-13):
        """``integral_{t0}^{t1} dt / value(t)^2``."""
        self._check(t0)
        self._check(t1)
        if t0 == t1:
            return 0.0
        return self._antiderivative(t1, tol) - self._antiderivative(t0, tol)
