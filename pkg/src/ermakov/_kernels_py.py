"""Pure-Python reference implementation of the numerical kernels.

The compiled module ``_ckernels`` implements the same two entry points with
identical arithmetic order, so both back ends agree to the last few ulps.

Programs are postfix instruction streams produced by
:func:`ermakov.expr.program.compile_node`: parallel sequences ``ops`` and
``args`` plus a constant pool. ``env`` holds variable values by slot.
"""
import math

from .errors import DomainError, QuadratureError

OP_CONST = 0
OP_VAR = 1
OP_NEG = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_POW = 7
OP_SIN = 8
OP_COS = 9
OP_EXP = 10
OP_LN = 11
OP_SQRT = 12
OP_ABS = 13
OP_TANH = 14

ERR_DIV_ZERO = 1
ERR_LN = 2
ERR_SQRT = 3
ERR_POW = 4
ERR_NONFINITE = 5

ERROR_MESSAGES = {
    ERR_DIV_ZERO: "division by zero",
    ERR_LN: "ln of non-positive value",
    ERR_SQRT: "sqrt of negative value",
    ERR_POW: "power outside its real domain",
    ERR_NONFINITE: "non-finite intermediate result",
}

BACKEND = "python"

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

EPS = 2.220446049250313e-16
DEFAULT_LIMIT = 2000


def _raise(code):
    raise DomainError(ERROR_MESSAGES[code])


def _pow(a, b):
    if a == 0.0 and b < 0.0:
        _raise(ERR_DIV_ZERO)
    if a < 0.0 and b != math.floor(b):
        _raise(ERR_POW)
    try:
        r = math.pow(a, b)
    except (OverflowError, ValueError):
        _raise(ERR_NONFINITE)
    return r


def eval_program(ops, args, consts, env):
    """Run a postfix program; raises :class:`DomainError` on any domain violation."""
    stack = []
    push = stack.append
    pop = stack.pop
    for op, arg in zip(ops, args):
        if op == OP_CONST:
            push(consts[arg])
            continue
        if op == OP_VAR:
            push(env[arg])
            continue
        if op <= OP_POW and op != OP_NEG:
            b = pop()
            a = pop()
            if op == OP_ADD:
                r = a + b
            elif op == OP_SUB:
                r = a - b
            elif op == OP_MUL:
                r = a * b
            elif op == OP_DIV:
                if b == 0.0:
                    _raise(ERR_DIV_ZERO)
                r = a / b
            else:
                r = _pow(a, b)
        else:
            a = pop()
            if op == OP_NEG:
                r = -a
            elif op == OP_SIN:
                r = math.sin(a)
            elif op == OP_COS:
                r = math.cos(a)
            elif op == OP_EXP:
                try:
                    r = math.exp(a)
                except OverflowError:
                    _raise(ERR_NONFINITE)
            elif op == OP_LN:
                if a <= 0.0:
                    _raise(ERR_LN)
                r = math.log(a)
            elif op == OP_SQRT:
                if a < 0.0:
                    _raise(ERR_SQRT)
                r = math.sqrt(a)
            elif op == OP_ABS:
                r = abs(a)
            else:
                r = math.tanh(a)
        if not math.isfinite(r):
            _raise(ERR_NONFINITE)
        push(r)
    return stack[-1]


def _gk15(f, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    resk = fc * WGK[7]
    resg = fc * WG[3]
    for j in range(7):
        dx = half * XGK[j]
        fsum = f(center - dx) + f(center + dx)
        resk += WGK[j] * fsum
        if j % 2 == 1:
            resg += WG[j // 2] * fsum
    resk *= half
    resg *= half
    return resk, abs(resk - resg)


def adaptive_quad(f, a, b, tol, limit=DEFAULT_LIMIT):
    """Globally adaptive Gauss-Kronrod (7/15) quadrature with interval halving.

    Returns ``(value, error_estimate, n_intervals)``. The error estimate is
    ``|K15 - G7|`` summed over the final partition and is driven below
    ``max(tol, 50 * eps * |value|)``.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0, 0.0, 0
    if a > b:
        v, e, n = adaptive_quad(f, b, a, tol, limit)
        return -v, e, n
    lo = [a]
    hi = [b]
    res = []
    err = []
    r, e = _gk15(f, a, b)
    res.append(r)
    err.append(e)
    while True:
        total = 0.0
        total_err = 0.0
        for k in range(len(res)):
            total += res[k]
            total_err += err[k]
        if total_err <= tol or total_err <= 50.0 * EPS * abs(total):
            return total, total_err, len(res)
        if len(res) >= limit:
            raise QuadratureError(
                f"tolerance {tol:g} not reached within {limit} subintervals "
                f"(estimate {total_err:.3g})"
            )
        worst = 0
        for k in range(1, len(err)):
            if err[k] > err[worst]:
                worst = k
        a1 = lo[worst]
        b2 = hi[worst]
        mid = 0.5 * (a1 + b2)
        if not (a1 < mid < b2):
            raise QuadratureError(f"interval collapsed near {a1!r} before reaching tolerance")
        r1, e1 = _gk15(f, a1, mid)
        r2, e2 = _gk15(f, mid, b2)
        hi[worst] = mid
        res[worst] = r1
        err[worst] = e1
        lo.append(mid)
        hi.append(b2)
        res.append(r2)
        err.append(e2)


def integrate_program(ops, args, consts, env, slot, a, b, tol, limit=DEFAULT_LIMIT):
    """Adaptive quadrature of a program over the variable held in ``env[slot]``."""
    env = list(env)

    def f(x):
        env[slot] = x
        return eval_program(ops, args, consts, env)

    return adaptive_quad(f, a, b, tol, limit)
