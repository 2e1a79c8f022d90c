"""Bracketed root finding for monotone scalar functions."""
import math

from .errors import RootFindingError


def expand_bracket(f, target, start, step, horizon):
    """Walk from ``start`` in the direction of ``step`` with doubling steps
    until ``f(x) - target`` changes sign; never beyond ``horizon`` distance."""
    a = start
    fa = f(a) - target
    if fa == 0.0:
        return a, a
    direction = 1.0 if step > 0 else -1.0
    width = abs(step)
    while True:
        dist = min(width, horizon)
        b = start + direction * dist
        fb = f(b) - target
        if fa * fb <= 0.0:
            return (a, b) if a < b else (b, a)
        if dist >= horizon:
            raise RootFindingError(
                f"no sign change of f - {target!r} within {horizon!r} of {start!r}")
        a, fa = b, fb
        width *= 2.0


def bisect_secant(f, target, lo, hi, xtol=0.0, ftol=1e-12, maxiter=200):
    """Solve ``f(x) = target`` on a sign-changing bracket ``[lo, hi]``.

    Bisection keeps the bracket; a secant step is taken whenever it falls
    strictly inside the bracket and shrinks it at least by half.
    """
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise RootFindingError(f"[{lo!r}, {hi!r}] does not bracket a root")
    best, fbest = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    for _ in range(maxiter):
        x = lo - flo * (hi - lo) / (fhi - flo)
        if not (lo < x < hi) or not math.isfinite(x):
            x = 0.5 * (lo + hi)
        fx = f(x) - target
        if abs(fx) < abs(fbest):
            best, fbest = x, fx
        if abs(fx) <= ftol or fx == 0.0:
            return x
        old = hi - lo
        if flo * fx < 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        if hi - lo > 0.5 * old:
            # secant stalled on one side; force a bisection
            mid = 0.5 * (lo + hi)
            fm = f(mid) - target
            if abs(fm) < abs(fbest):
                best, fbest = mid, fm
            if abs(fm) <= ftol or fm == 0.0:
                return mid
            if flo * fm < 0.0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
        if hi - lo <= max(xtol, 4e-16 * max(abs(lo), abs(hi))):
            return best
    raise RootFindingError(f"no convergence after {maxiter} iterations (|f|={abs(fbest):.3g})")
