"""Compare the compiled and pure-Python kernels on expression evaluation and quadrature.

Run with ``python benchmarks/bench_kernels.py``. Both back ends must give
bit-identical results; the script exits non-zero if they do not.
"""
import sys
import timeit

import numpy as np

from ermakov import _kernels_py as py
from ermakov.expr import parse

try:
    from ermakov import _ckernels as cy
except ImportError:
    cy = None

CASES = [
    ("G elliptic", "0.1/tau^2 + 0.5 + 0.2*tau + 0.1*tau^2", ("tau",), 0.3, 2.0),
    ("1/rho^2", "1/(1+t^2)", ("t",), 0.0, 20.0),
    ("oscillatory", "sin(3*t)*exp(-t/4) + sqrt(1+t^2)", ("t",), 0.0, 10.0),
]


def main(number=200):
    if cy is None:
        print("compiled extension not built; nothing to compare")
        return 0
    bad = 0
    print(f"{'case':<14}{'op':<10}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for name, src, names, a, b in CASES:
        prog = parse(src, names).program
        ops, args, consts = prog.ops, prog.args, prog.consts
        oa, aa, ca = prog._ops_a, prog._args_a, prog._consts_a
        env = [0.7]
        enva = np.array(env)
        same = py.eval_program(ops, args, consts, env) == cy.eval_program(oa, aa, ca, enva)
        rp = py.integrate_program(ops, args, consts, env, 0, a, b, 1e-12)
        rc = cy.integrate_program(oa, aa, ca, enva, 0, a, b, 1e-12)
        same &= rp[0] == rc[0]
        bad += not same
        for op, fp, fc, n in [
            ("eval", lambda: py.eval_program(ops, args, consts, env),
             lambda: cy.eval_program(oa, aa, ca, enva), number * 50),
            ("quad", lambda: py.integrate_program(ops, args, consts, env, 0, a, b, 1e-12),
             lambda: cy.integrate_program(oa, aa, ca, enva, 0, a, b, 1e-12), number),
        ]:
            tp = min(timeit.repeat(fp, number=n, repeat=3)) / n * 1e6
            tc = min(timeit.repeat(fc, number=n, repeat=3)) / n * 1e6
            print(f"{name:<14}{op:<10}{tp:14.2f}{tc:14.2f}{tp / tc:10.1f}")
        if not same:
            print(f"  results differ for {name}: {rp[0]!r} vs {rc[0]!r}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
