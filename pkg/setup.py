"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension; ``mammocad._backend``
falls back to the pure numpy kernels when the compiled module is missing.
Set MAMMOCAD_SKIP_EXT=1 to force a pure-Python install.
"""

import os

from setuptools import setup

ext_modules = []
include_dirs = []

if not os.environ.get("MAMMOCAD_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/mammocad/_kernels.pyx",
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
        include_dirs = [numpy.get_include()]
    except ImportError:
        ext_modules = []
        include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
