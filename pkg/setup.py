"""Build hook for the optional compiled kernels.

The package works without the extension; ``ermakov.kernels`` falls back to
the pure-Python implementation when ``_ckernels`` is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("ERMAKOV_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "ermakov._ckernels",
                    ["src/ermakov/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
