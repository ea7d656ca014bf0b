"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so any failure to cythonize or compile is non-fatal.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/uavflow/_kernels.pyx",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
    include_dirs = [numpy.get_include()]
except Exception:
    include_dirs = []

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
)
