"""Back-end selection for the numerical kernels.

The compiled extension is used when it has been built; otherwise the
pure-Python implementation is used. Setting ``ERMAKOV_PURE_PYTHON=1`` forces
the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("ERMAKOV_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
eval_program = _impl.eval_program
integrate_program = _impl.integrate_program
adaptive_quad = _kernels_py.adaptive_quad
