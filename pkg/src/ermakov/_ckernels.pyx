# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; mirrors ``_kernels_py`` operation for operation."""
from libc.math cimport sin, cos, exp, log, sqrt, fabs, tanh, pow, floor, isfinite
from libc.stdlib cimport malloc, free

from .errors import DomainError, QuadratureError
from ._kernels_py import ERROR_MESSAGES, DEFAULT_LIMIT

BACKEND = "cython"

cdef enum:
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

cdef double EPS = 2.220446049250313e-16

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
WGK[:] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
WG[:] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]


cdef double _run(const int[::1] ops, const int[::1] args, const double[::1] consts,
                 double* env, double* stack, int* err) noexcept nogil:
    cdef Py_ssize_t i, n = ops.shape[0]
    cdef int sp = 0
    cdef int op
    cdef double a, b, r
    for i in range(n):
        op = ops[i]
        if op == OP_CONST:
            stack[sp] = consts[args[i]]
            sp += 1
            continue
        if op == OP_VAR:
            stack[sp] = env[args[i]]
            sp += 1
            continue
        if op <= OP_POW and op != OP_NEG:
            sp -= 1
            b = stack[sp]
            a = stack[sp - 1]
            if op == OP_ADD:
                r = a + b
            elif op == OP_SUB:
                r = a - b
            elif op == OP_MUL:
                r = a * b
            elif op == OP_DIV:
                if b == 0.0:
                    err[0] = 1
                    return 0.0
                r = a / b
            else:
                if a == 0.0 and b < 0.0:
                    err[0] = 1
                    return 0.0
                if a < 0.0 and b != floor(b):
                    err[0] = 4
                    return 0.0
                r = pow(a, b)
        else:
            a = stack[sp - 1]
            if op == OP_NEG:
                r = -a
            elif op == OP_SIN:
                r = sin(a)
            elif op == OP_COS:
                r = cos(a)
            elif op == OP_EXP:
                r = exp(a)
            elif op == OP_LN:
                if a <= 0.0:
                    err[0] = 2
                    return 0.0
                r = log(a)
            elif op == OP_SQRT:
                if a < 0.0:
                    err[0] = 3
                    return 0.0
                r = sqrt(a)
            elif op == OP_ABS:
                r = fabs(a)
            else:
                r = tanh(a)
        if not isfinite(r):
            err[0] = 5
            return 0.0
        stack[sp - 1] = r
    return stack[sp - 1]


def eval_program(const int[::1] ops, const int[::1] args, const double[::1] consts, env):
    cdef double[::1] envv = env if not isinstance(env, (list, tuple)) else _as_array(env)
    cdef int err = 0
    cdef double r
    cdef double* stack = <double*> malloc((ops.shape[0] + 1) * sizeof(double))
    if stack == NULL:
        raise MemoryError()
    try:
        r = _run(ops, args, consts, &envv[0] if envv.shape[0] else NULL, stack, &err)
    finally:
        free(stack)
    if err:
        raise DomainError(ERROR_MESSAGES[err])
    return r


cdef _as_array(seq):
    import numpy as np
    return np.ascontiguousarray(seq, dtype=np.float64)


cdef void _gk15(const int[::1] ops, const int[::1] args, const double[::1] consts,
                double* env, int slot, double* stack, double a, double b,
                double* res, double* abserr, int* err) noexcept nogil:
    cdef double center = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double fc, f1, f2, fsum, dx, resk, resg
    cdef int j
    env[slot] = center
    fc = _run(ops, args, consts, env, stack, err)
    if err[0]:
        return
    resk = fc * WGK[7]
    resg = fc * WG[3]
    for j in range(7):
        dx = half * XGK[j]
        env[slot] = center - dx
        f1 = _run(ops, args, consts, env, stack, err)
        if err[0]:
            return
        env[slot] = center + dx
        f2 = _run(ops, args, consts, env, stack, err)
        if err[0]:
            return
        fsum = f1 + f2
        resk += WGK[j] * fsum
        if j % 2 == 1:
            resg += WG[j // 2] * fsum
    resk *= half
    resg *= half
    res[0] = resk
    abserr[0] = fabs(resk - resg)


def integrate_program(const int[::1] ops, const int[::1] args, const double[::1] consts,
                      env, int slot, double a, double b, double tol, int limit=DEFAULT_LIMIT):
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0, 0.0, 0
    if a > b:
        v, e, m = _integrate(ops, args, consts, env, slot, b, a, tol, limit)
        return -v, e, m
    return _integrate(ops, args, consts, env, slot, a, b, tol, limit)


cdef _integrate(const int[::1] ops, const int[::1] args, const double[::1] consts,
                env, int slot, double a, double b, double tol, int limit):
    cdef double[::1] envv = _as_array(env).copy()
    cdef double* stack = <double*> malloc((ops.shape[0] + 1) * sizeof(double))
    cdef double* lo = <double*> malloc(limit * sizeof(double))
    cdef double* hi = <double*> malloc(limit * sizeof(double))
    cdef double* res = <double*> malloc(limit * sizeof(double))
    cdef double* errs = <double*> malloc(limit * sizeof(double))
    cdef int err = 0
    cdef int n = 1, k, worst
    cdef double total, total_err, a1, b2, mid, r1, e1, r2, e2
    cdef int status = 0
    try:
        if stack == NULL or lo == NULL or hi == NULL or res == NULL or errs == NULL:
            raise MemoryError()
        with nogil:
            lo[0] = a
            hi[0] = b
            _gk15(ops, args, consts, &envv[0], slot, stack, a, b, &res[0], &errs[0], &err)
            while err == 0:
                total = 0.0
                total_err = 0.0
                for k in range(n):
                    total += res[k]
                    total_err += errs[k]
                if total_err <= tol or total_err <= 50.0 * EPS * fabs(total):
                    break
                if n >= limit:
                    status = 1
                    break
                worst = 0
                for k in range(1, n):
                    if errs[k] > errs[worst]:
                        worst = k
                a1 = lo[worst]
                b2 = hi[worst]
                mid = 0.5 * (a1 + b2)
                if not (a1 < mid and mid < b2):
                    status = 2
                    break
                _gk15(ops, args, consts, &envv[0], slot, stack, a1, mid, &r1, &e1, &err)
                if err:
                    break
                _gk15(ops, args, consts, &envv[0], slot, stack, mid, b2, &r2, &e2, &err)
                if err:
                    break
                hi[worst] = mid
                res[worst] = r1
                errs[worst] = e1
                lo[n] = mid
                hi[n] = b2
                res[n] = r2
                errs[n] = e2
                n += 1
        if err:
            raise DomainError(ERROR_MESSAGES[err])
        if status == 1:
            raise QuadratureError(
                f"tolerance {tol:g} not reached within {limit} subintervals "
                f"(estimate {total_err:.3g})"
            )
        if status == 2:
            raise QuadratureError(f"interval collapsed near {a1!r} before reaching tolerance")
        return total, total_err, n
    finally:
        free(stack)
        free(lo)
        free(hi)
        free(res)
        free(errs)
