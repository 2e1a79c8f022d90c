"""Independent reference computations used to derive frozen test values.

These use SciPy (a test-only dependency) so that they share no code with
the package under test.
"""
import numpy as np
from scipy.integrate import quad, solve_ivp


def dop853(acc, state0, t0, t_end, ts, rtol=1e-13, atol=1e-15):
    """Integrate ``(x'', y'') = acc(t, x, y, xd, yd)`` with SciPy's DOP853."""

    def f(t, u):
        ax, ay = acc(t, *u)
        return [u[2], u[3], ax, ay]

    sol = solve_ivp(f, (t0, t_end), list(state0), method="DOP853", t_eval=ts,
                    rtol=rtol, atol=atol)
    assert sol.success, sol.message
    return sol.y.T


def scalar_quad(f, a, b):
    value, _ = quad(f, a, b, epsabs=1e-14, epsrel=1e-14, limit=500)
    return value


def rho_sqrt(t):
    """``rho = sqrt(1+t^2)`` with its first two derivatives."""
    r = np.sqrt(1 + t * t)
    return r, t / r, r ** -3


def symmetric_master_acc(t, x, y, xd, yd):
    """Accelerations of the criterion-1 system written out by hand.

    ``W2 = -rho''/rho + sigma/rho^4`` with ``sigma = a1^2 + b1 b2`` and ``F(r) = r``.
    """
    r, rd, rdd = rho_sqrt(t)
    a1 = x / r
    b1 = r * xd - rd * x
    b2 = r * yd - rd * y
    w2 = -rdd / r + (a1 * a1 + b1 * b2) / r ** 4
    return -w2 * x + (y / x) / (y * x * x), -w2 * y


def elliptic_acc(c1, c2, c3, c4):
    """Coupled oscillator with ``w = rho = 1`` and the four-term coupling."""

    def acc(t, x, y, xd, yd):
        q = x * y
        G = c1 / q ** 2 + c2 + c3 * q + c4 * q * q
        return -x + x * G, -y + y * G

    return acc
