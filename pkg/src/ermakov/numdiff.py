"""Finite-difference differentiation of sampled curves on non-uniform grids."""
import numpy as np


def fornberg_weights(x0, xs, m):
    """Weights for derivatives 0..m at ``x0`` from nodes ``xs`` (Fornberg 1988)."""
    n = len(xs)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def differentiate(ts, values, width=7):
    """First derivative of sampled ``values`` at every node of ``ts``.

    Uses ``width``-point stencils, centred where possible and shifted to stay
    inside the data at the ends.
    """
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    n = len(ts)
    if n < width:
        raise ValueError(f"need at least {width} samples, got {n}")
    if not np.all(np.diff(ts) > 0):
        raise ValueError("sample times must be strictly increasing")
    half = width // 2
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        idx = slice(lo, lo + width)
        w = fornberg_weights(ts[i], ts[idx], 1)
        out[i] = w @ values[idx]
    return out


def local_derivative(f, t, h, lo=-np.inf, hi=np.inf, width=7):
    """``f'(t)`` from a ``width``-point stencil of spacing ``h`` kept inside ``[lo, hi]``."""
    half = width // 2
    c = min(max(t, lo + half * h), hi - half * h)
    xs = c + h * np.arange(-half, width - half)
    w = fornberg_weights(t, xs, 1)
    return float(sum(wi * f(x) for wi, x in zip(w, xs)))
